#include "amb/gjms.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <random>

#include "amb/simd.hpp"

namespace amb {

struct SpectralTorus::Plans {
  fftw_plan fwd = nullptr, bwd = nullptr;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_complex* work = nullptr;
};

// The FFTW planner is not reentrant; execution is.
static std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

SpectralTorus::SpectralTorus(std::vector<int> N) : N_(std::move(N)), plans_(std::make_unique<Plans>()) {
  if (N_.empty()) throw std::invalid_argument("SpectralTorus: empty grid");
  size_ = 1;
  for (int m : N_) {
    if (m < 2) throw std::invalid_argument("SpectralTorus: need at least 2 points per axis");
    size_ *= m;
  }
  csize_ = size_ / N_.back() * (N_.back() / 2 + 1);
  plans_->real = fftw_alloc_real(size_);
  plans_->spec = fftw_alloc_complex(csize_);
  plans_->work = fftw_alloc_complex(csize_);
  const int rank = static_cast<int>(N_.size());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->fwd = fftw_plan_dft_r2c(rank, N_.data(), plans_->real, plans_->spec, FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_dft_c2r(rank, N_.data(), plans_->work, plans_->real, FFTW_ESTIMATE);
}

SpectralTorus::~SpectralTorus() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
  fftw_free(plans_->real);
  fftw_free(plans_->spec);
  fftw_free(plans_->work);
}

std::vector<std::vector<double>> SpectralTorus::gradient(const std::vector<double>& f) const {
  if (f.size() != size_) throw std::invalid_argument("SpectralTorus: size mismatch");
  const int rank = static_cast<int>(N_.size());
  std::copy(f.begin(), f.end(), plans_->real);
  fftw_execute(plans_->fwd);
  std::vector<std::vector<double>> out(rank, std::vector<double>(size_));
  const double norm = 1.0 / static_cast<double>(size_);
  std::vector<int> cdims(N_);
  cdims.back() = N_.back() / 2 + 1;
  for (int axis = 0; axis < rank; ++axis) {
    std::vector<int> idx(rank, 0);
    for (size_t c = 0; c < csize_; ++c) {
      int m = N_[axis], i = idx[axis];
      int k = (axis == rank - 1) ? i : (i <= m / 2 ? i : i - m);
      if (m % 2 == 0 && i == m / 2) k = 0;  // Nyquist
      const double re = plans_->spec[c][0], im = plans_->spec[c][1];
      plans_->work[c][0] = -k * im * norm;
      plans_->work[c][1] = k * re * norm;
      for (int d = rank - 1; d >= 0; --d) {
        if (++idx[d] < cdims[d]) break;
        idx[d] = 0;
      }
    }
    fftw_execute(plans_->bwd);
    std::copy(plans_->real, plans_->real + size_, out[axis].begin());
  }
  return out;
}

GridOperator::GridOperator(const MetricMeasure& mm, const std::vector<int>& grid)
    : n_(mm.n()), rule_(torus_rule(grid)), sp_(grid) {
  if (mm.chart.topology != Topology::Torus) throw std::invalid_argument("GridOperator: torus scenarios only");
  if (sgn(mm.lambda) != 0) throw std::invalid_argument("GridOperator: lambda must be 0");
  if (static_cast<int>(grid.size()) != n_) throw std::invalid_argument("GridOperator: grid rank mismatch");
  const size_t M = rule_.size();
  ginv_.assign(n_ * n_, std::vector<double>(M));
  sqrtg_.resize(M);
  rho_.resize(M);
  mu_.resize(M);
  Rphi_.resize(M);
  JetSpec spec;
  spec.n_vars = n_;
  spec.spatial_degree = 2;
  spec.u_order = 0;
  spec.mode = CoeffMode::Float;
  for (size_t q = 0; q < M; ++q) {
    auto mj = to_jets_at(mm, spec, rule_.nodes[q]);
    auto w = weighted_invariants(mj);
    Jet<double> det;
    inverse(mj.g, &det);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) ginv_[i * n_ + j][q] = w.lc.ginv(i, j).constant_term();
    sqrtg_[q] = std::sqrt(det.constant_term());
    const double phi = mj.phi.constant_term();
    rho_[q] = sqrtg_[q] * std::exp(-phi);
    mu_[q] = rule_.weights[q] * rho_[q];
    Rphi_[q] = w.R_phi.constant_term();
  }
}

std::vector<double> GridOperator::divergence_form(const std::vector<double>& f, const std::vector<double>& rho) const {
  const size_t M = rule_.size();
  const auto& K = simd::active();
  auto df = sp_.gradient(f);
  std::vector<double> out(M, 0.0), flux(M), tmp(M);
  for (int i = 0; i < n_; ++i) {
    std::fill(flux.begin(), flux.end(), 0.0);
    for (int j = 0; j < n_; ++j) {
      K.mul(ginv_[i * n_ + j].data(), df[j].data(), tmp.data(), M);
      K.axpy(1.0, tmp.data(), flux.data(), M);
    }
    K.mul(flux.data(), rho.data(), flux.data(), M);
    auto d = sp_.gradient(flux);
    K.axpy(1.0, d[i].data(), out.data(), M);
  }
  for (size_t q = 0; q < M; ++q) out[q] /= rho[q];
  return out;
}

std::vector<double> GridOperator::drift_laplacian(const std::vector<double>& f) const {
  return divergence_form(f, rho_);
}

std::vector<double> GridOperator::plain_laplacian(const std::vector<double>& f) const {
  return divergence_form(f, sqrtg_);
}

std::vector<double> GridOperator::gjms(const std::vector<double>& f, int k) const {
  std::vector<double> r = f;
  std::vector<double> c(Rphi_.size());
  for (int s = 0; s < k; ++s) {
    auto lap = drift_laplacian(r);
    simd::active().mul(Rphi_.data(), r.data(), c.data(), c.size());
    simd::active().axpy(-0.25, c.data(), lap.data(), lap.size());
    r = std::move(lap);
  }
  return r;
}

std::vector<double> GridOperator::drift_power(const std::vector<double>& f, int k) const {
  std::vector<double> r = f;
  for (int s = 0; s < k; ++s) r = drift_laplacian(r);
  return r;
}

double GridOperator::inner(const std::vector<double>& a, const std::vector<double>& b) const {
  return simd::active().weighted_dot(mu_.data(), a.data(), b.data(), a.size());
}

std::vector<double> random_trig(const QuadRule& q, uint64_t seed, int terms, int max_freq) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> fq(-max_freq, max_freq);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<double> f(q.size(), 0.0);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> k(q.n);
    for (auto& v : k) v = fq(rng);
    double a = amp(rng), b = amp(rng);
    for (size_t i = 0; i < q.size(); ++i) {
      double ph = 0;
      for (int d = 0; d < q.n; ++d) ph += k[d] * q.nodes[i][d];
      f[i] += a * std::cos(ph) + b * std::sin(ph);
    }
  }
  return f;
}

static SelfAdjointResult pairing(const GridOperator& op, const std::vector<double>& Lf, const std::vector<double>& Lh,
                                 const std::vector<double>& f, const std::vector<double>& h) {
  SelfAdjointResult r;
  r.residual = std::abs(op.inner(Lf, h) - op.inner(f, Lh));
  r.scale = std::sqrt(op.inner(f, f) * op.inner(h, h));
  return r;
}

SelfAdjointResult gjms_selfadjoint_residual(const GridOperator& op, int k, const std::vector<double>& f,
                                            const std::vector<double>& h) {
  return pairing(op, op.gjms(f, k), op.gjms(h, k), f, h);
}

SelfAdjointResult plain_selfadjoint_residual(const GridOperator& op, int k, const std::vector<double>& f,
                                             const std::vector<double>& h) {
  std::vector<double> Lf = f, Lh = h;
  for (int s = 0; s < k; ++s) {
    Lf = op.plain_laplacian(Lf);
    Lh = op.plain_laplacian(Lh);
  }
  return pairing(op, Lf, Lh, f, h);
}

double leading_symbol_ratio(const GridOperator& op, int k, int m) {
  const auto& q = op.rule();
  std::vector<double> f(q.size());
  for (size_t i = 0; i < q.size(); ++i) f[i] = std::sin(m * q.nodes[i][0]);
  auto a = op.gjms(f, k), b = op.drift_power(f, k);
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return std::sqrt(op.inner(d, d) / op.inner(b, b));
}

}  // namespace amb
