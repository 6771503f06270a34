// Grid kernels with a scalar reference path and an AVX2/FMA path chosen at
// runtime.  Only the reductions and axpy-type loops used by quadrature and the
// spectral operators live here.
#pragma once

#include <cstddef>
#include <string>

namespace amb::simd {

enum class Isa { Scalar, Avx2 };

struct Kernels {
  // sum_i w_i a_i b_i
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  // sum_i w_i a_i
  double (*weighted_sum)(const double* w, const double* a, std::size_t n);
  // y_i += alpha x_i
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out_i = a_i * b_i
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

bool avx2_available();
const Kernels& kernels(Isa isa);
// Best available ISA unless AMB_SIMD=scalar is set.
const Kernels& active();
Isa active_isa();
std::string isa_name(Isa isa);

}  // namespace amb::simd
