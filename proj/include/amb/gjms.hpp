// Weighted GJMS-type operators L_2k = (Delta_phi - R_phi/4)^k, lambda = 0:
// a jet version at a point and a pseudo-spectral version on periodic grids.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "amb/quadrature.hpp"
#include "amb/scenario.hpp"

namespace amb {

template <class S>
Jet<S> gjms_apply(const MetricJets<S>& mm, int k, const Jet<S>& f) {
  if (!Scalar<S>::is_zero(mm.lambda)) throw std::invalid_argument("gjms_apply: lambda must be 0");
  auto w = weighted_invariants(mm);
  Jet<S> r = f;
  for (int i = 0; i < k; ++i) r = weighted_laplacian(mm, w.lc, r) - (w.R_phi * r).scaled(S(1) / S(4));
  return r;
}

// Pseudo-spectral derivatives on the grid [0, 2pi)^n (FFTW, r2c/c2r).  The
// Nyquist mode is dropped so the discrete derivative is skew-adjoint.
class SpectralTorus {
 public:
  explicit SpectralTorus(std::vector<int> N);
  ~SpectralTorus();
  SpectralTorus(const SpectralTorus&) = delete;
  SpectralTorus& operator=(const SpectralTorus&) = delete;

  size_t size() const { return size_; }
  const std::vector<int>& dims() const { return N_; }
  // All first partials of f.
  std::vector<std::vector<double>> gradient(const std::vector<double>& f) const;

 private:
  struct Plans;
  std::vector<int> N_;
  size_t size_ = 0, csize_ = 0;
  std::unique_ptr<Plans> plans_;
};

// Discretised operator on a torus scenario (lambda = 0).  Delta_phi is applied
// in divergence form rho^-1 d_i(rho g^ij d_j f), rho = sqrt(det g) e^-phi, which
// is discretely self-adjoint for <a, b>_phi.
class GridOperator {
 public:
  GridOperator(const MetricMeasure& mm, const std::vector<int>& grid);

  const QuadRule& rule() const { return rule_; }
  std::vector<double> drift_laplacian(const std::vector<double>& f) const;
  // Unweighted Laplace-Beltrami: the negative control for self-adjointness.
  std::vector<double> plain_laplacian(const std::vector<double>& f) const;
  std::vector<double> gjms(const std::vector<double>& f, int k) const;
  std::vector<double> drift_power(const std::vector<double>& f, int k) const;
  double inner(const std::vector<double>& a, const std::vector<double>& b) const;  // <a,b>_phi
  const std::vector<double>& R_phi() const { return Rphi_; }

 private:
  std::vector<double> divergence_form(const std::vector<double>& f, const std::vector<double>& rho) const;
  int n_;
  QuadRule rule_;
  SpectralTorus sp_;
  std::vector<std::vector<double>> ginv_;  // ginv_[i*n+j][node]
  std::vector<double> sqrtg_, rho_, mu_, Rphi_;
};

// Random trigonometric polynomial sampled on the rule nodes.
std::vector<double> random_trig(const QuadRule& q, uint64_t seed, int terms = 4, int max_freq = 3);

struct SelfAdjointResult {
  double residual = 0;  // |<Lf,h> - <f,Lh>|
  double scale = 0;     // |f| |h|
  double relative() const { return scale > 0 ? residual / scale : residual; }
};

SelfAdjointResult gjms_selfadjoint_residual(const GridOperator& op, int k, const std::vector<double>& f,
                                            const std::vector<double>& h);
// Same pairing for the plain Laplacian power (not symmetric when phi varies).
SelfAdjointResult plain_selfadjoint_residual(const GridOperator& op, int k, const std::vector<double>& f,
                                             const std::vector<double>& h);
// |L_2k f - Delta_phi^k f| / |Delta_phi^k f| for f = sin(m x1).
double leading_symbol_ratio(const GridOperator& op, int k, int m);

}  // namespace amb
