// Normal-form weighted ambient metric  g~ = 2 du dv + g_u,
// phi~ = phi_u - v + lambda u v, built order by order in u.
//
// Ambient index layout: 0 = v, 1..n = x, n+1 = u (written "inf" below).
#pragma once

#include <string>
#include <vector>

#include "amb/geometry.hpp"

namespace amb {

// The constant in F~ = lap~ phi~ - |grad~ phi~|^2 + 2 lambda phi~ - N lambda is
// N = n + dim_shift.  Calibration selects dim_shift.
struct AmbientConvention {
  int dim_shift = 2;
};

template <class S>
struct AmbientExpansion {
  MetricJets<S> base;
  int K = 0;
  std::vector<Mat<S>> g_coeffs;    // Taylor coefficients: g_u = sum_k g_coeffs[k] u^k
  std::vector<Jet<S>> phi_coeffs;  // phi_u = sum_k phi_coeffs[k] u^k
  AmbientConvention conv;

  int n() const { return base.dim(); }
  const JetSpec& spec() const { return base.phi.spec(); }
  S lambda() const { return base.lambda; }

  Mat<S> g_u() const {
    Mat<S> r = g_coeffs[0];
    for (size_t k = 1; k < g_coeffs.size(); ++k)
      for (size_t i = 0; i < r.c.size(); ++i)
        if (!g_coeffs[k].c[i].is_zero()) r.c[i] += g_coeffs[k].c[i].shift_u(static_cast<int>(k));
    return r;
  }
  Jet<S> phi_u() const {
    Jet<S> r = phi_coeffs[0];
    for (size_t k = 1; k < phi_coeffs.size(); ++k)
      if (!phi_coeffs[k].is_zero()) r += phi_coeffs[k].shift_u(static_cast<int>(k));
    return r;
  }
  // k-th u-derivative at u = 0.
  Mat<S> g_derivative(int k) const {
    S f = 1;
    for (int j = 2; j <= k; ++j) f *= Scalar<S>::from_int(j);
    return mat_scale(g_coeffs.at(k), f);
  }
  Jet<S> phi_derivative(int k) const {
    S f = 1;
    for (int j = 2; j <= k; ++j) f *= Scalar<S>::from_int(j);
    return phi_coeffs.at(k).scaled(f);
  }
};

template <class S>
AmbientExpansion<S> start_expansion(const MetricJets<S>& base, AmbientConvention conv = {}) {
  AmbientExpansion<S> e;
  e.base = base;
  e.conv = conv;
  e.K = 0;
  e.g_coeffs.push_back(base.g);
  e.phi_coeffs.push_back(base.phi);
  return e;
}

// Lorentzian metric-measure pair on the (n+2)-dimensional chart.  The density
// is A + v B with A, B independent of v.
template <class S>
struct AmbientMetric {
  int n = 0;
  Frame fr;
  Mat<S> G;
  Jet<S> A, B;
  S lambda;
  int N() const { return n + 2; }
  int inf() const { return n + 1; }
};

template <class S>
Frame ambient_frame(int n) {
  Frame f;
  f.dim = n + 2;
  f.dvar.push_back(-1);
  for (int i = 0; i < n; ++i) f.dvar.push_back(i);
  f.dvar.push_back(n);
  return f;
}

// Builds the pair from explicit (g_u, phi_u) and an optional du^2 coefficient.
template <class S>
AmbientMetric<S> ambient_from_family(const Mat<S>& gu, const Jet<S>& phiu, const S& lambda,
                                     const Jet<S>* guu = nullptr) {
  const int n = gu.dim;
  const JetSpec& spec = phiu.spec();
  AmbientMetric<S> am;
  am.n = n;
  am.fr = ambient_frame<S>(n);
  am.lambda = lambda;
  am.G = Mat<S>(spec, n + 2, 2, Symmetry::Symmetric2);
  am.G(0, n + 1) = Jet<S>::constant(spec, S(1));
  am.G(n + 1, 0) = am.G(0, n + 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) am.G(i + 1, j + 1) = gu(i, j);
  if (guu) am.G(n + 1, n + 1) = *guu;
  am.A = phiu;
  am.B = Jet<S>::u(spec).scaled(lambda).plus_constant(S(-1));
  return am;
}

template <class S>
AmbientMetric<S> ambient_assemble(const AmbientExpansion<S>& e) {
  return ambient_from_family(e.g_u(), e.phi_u(), e.lambda());
}

// Weighted Einstein-type residuals of the ambient pair, as u-series at v = 0,
// together with the coefficients of v and v^2 (which must also vanish).
template <class S>
struct AmbientResidual {
  Mat<S> P;    // (Ric~ + Hess~ phi~ - lambda g~)_IJ at v = 0
  Mat<S> P_v;  // coefficient of v
  Jet<S> F, F_v, F_vv;
  bool full = true;

  // Largest |coefficient| of u^k for k < k_end within each jet's validity.
  double max_abs_below(int k_end) const {
    double m = std::max({F.max_abs_below_u(k_end), F_v.max_abs_below_u(k_end), F_vv.max_abs_below_u(k_end)});
    for (const auto& j : P.c) m = std::max(m, j.max_abs_below_u(k_end));
    for (const auto& j : P_v.c) m = std::max(m, j.max_abs_below_u(k_end));
    return m;
  }
};

enum class ResidualScope { SolveBlock, All };

template <class S>
AmbientResidual<S> ambient_residual(const AmbientMetric<S>& am, const AmbientConvention& conv,
                                    ResidualScope scope = ResidualScope::All) {
  const int N = am.N();
  const JetSpec& spec = am.A.spec();
  const S lam = am.lambda;
  auto lc = levi_civita(am.G, am.fr);
  std::vector<std::vector<bool>> mask(N, std::vector<bool>(N, scope == ResidualScope::All));
  if (scope == ResidualScope::SolveBlock)
    for (int i = 1; i <= am.n; ++i)
      for (int j = 1; j <= am.n; ++j) mask[i][j] = true;
  Mat<S> ric = ricci(lc, &mask);

  // First and second derivatives of phi~ at v = 0.
  std::vector<Jet<S>> dA = gradient(am.A, am.fr), dB = gradient(am.B, am.fr);
  std::vector<Jet<S>> Phi = dA;
  Phi[0] += am.B;
  AmbientResidual<S> r;
  r.full = scope == ResidualScope::All;
  r.P = Mat<S>(spec, N, 2, Symmetry::Symmetric2);
  r.P_v = Mat<S>(spec, N, 2, Symmetry::Symmetric2);
  Mat<S> H(spec, N, 2), Hv(spec, N, 2);
  for (int I = 0; I < N; ++I)
    for (int J = I; J < N; ++J) {
      Jet<S> h = dA[I].is_zero() ? Jet<S>::zero(spec) : dd(dA[I], am.fr, J);
      if (I == 0) h += dB[J];
      if (J == 0) h += dB[I];
      Jet<S> hv = dB[I].is_zero() ? Jet<S>::zero(spec) : dd(dB[I], am.fr, J);
      for (int K = 0; K < N; ++K) {
        sub_prod(h, lc.gamma(K, I, J), Phi[K]);
        sub_prod(hv, lc.gamma(K, I, J), dB[K]);
      }
      H(I, J) = H(J, I) = h;
      Hv(I, J) = Hv(J, I) = hv;
    }
  for (int I = 0; I < N; ++I)
    for (int J = I; J < N; ++J) {
      if (!mask[I][J]) continue;
      Jet<S> p = ric(I, J) + H(I, J) - am.G(I, J).scaled(lam);
      r.P(I, J) = r.P(J, I) = p;
      r.P_v(I, J) = r.P_v(J, I) = Hv(I, J);
    }
  const auto& Gi = lc.ginv;
  Jet<S> lap = trace(Gi, H), lapv = trace(Gi, Hv);
  Jet<S> grad2 = inner(Gi, Phi, Phi), cross = inner(Gi, Phi, dB), dB2 = inner(Gi, dB, dB);
  const S Nl = Scalar<S>::from_int(am.n + conv.dim_shift) * lam;
  r.F = (lap - grad2 + am.A.scaled(S(2) * lam)).plus_constant(S(-Nl));
  r.F_v = lapv - cross.scaled(S(2)) + am.B.scaled(S(2) * lam);
  r.F_vv = -dB2;
  return r;
}

// Kills the u^{m-1} coefficient of P~_ij (through g_coeffs[m]) and then of
// F~ (through phi_coeffs[m]).  Coefficients of order > m are left in place;
// they do not enter the u^{m-1} coefficients.
template <class S>
void solve_order(AmbientExpansion<S>& e, int m) {
  const int n = e.n();
  const JetSpec& spec = e.spec();
  if (m < 1) throw std::invalid_argument("solve_order: m >= 1");
  if (m > spec.u_order) throw BudgetExhausted("solve_order: u-order cap below requested order");
  if (spec.spatial_degree - 2 * m < 0) throw BudgetExhausted("solve_order: spatial budget exhausted");
  if (static_cast<int>(e.g_coeffs.size()) < m) throw std::invalid_argument("solve_order: lower orders missing");
  if (static_cast<int>(e.g_coeffs.size()) == m) {
    e.g_coeffs.push_back(Mat<S>(spec, n, 2, Symmetry::Symmetric2));
    e.phi_coeffs.push_back(Jet<S>::zero(spec));
  }
  e.g_coeffs[m] = Mat<S>(spec, n, 2, Symmetry::Symmetric2);
  e.phi_coeffs[m] = Jet<S>::zero(spec);
  const S Sm = Scalar<S>::from_int(m);
  {
    auto res = ambient_residual(ambient_assemble(e), e.conv, ResidualScope::SolveBlock);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet<S> c = res.P(i + 1, j + 1).u_coeff(m - 1).scaled(S(2) / Sm);
        e.g_coeffs[m](i, j) = c;
        e.g_coeffs[m](j, i) = c;
      }
  }
  {
    auto res = ambient_residual(ambient_assemble(e), e.conv, ResidualScope::SolveBlock);
    e.phi_coeffs[m] = res.F.u_coeff(m - 1).scaled(S(-1) / (S(2) * Sm));
  }
  e.K = std::max(e.K, m);
}

template <class S>
AmbientExpansion<S> solve_ambient(const MetricJets<S>& base, int K, AmbientConvention conv = {}) {
  const JetSpec& spec = base.phi.spec();
  if (spec.spatial_degree < 2 * K + 2)
    throw BudgetExhausted("solve_ambient: spatial degree " + std::to_string(spec.spatial_degree) +
                          " below 2K+2 = " + std::to_string(2 * K + 2));
  if (spec.u_order < K) throw BudgetExhausted("solve_ambient: u-order cap below K");
  auto e = start_expansion(base, conv);
  for (int m = 1; m <= K; ++m) solve_order(e, m);
  return e;
}

// Per-component verification of a solved expansion: the u-order through which
// each component was checked and the largest offending coefficient.
struct ComponentCheck {
  std::string name;
  int verified_through = -1;  // u^0 .. u^verified_through checked
  double max_abs = 0;
};

template <class S>
std::vector<ComponentCheck> verify_residual(const AmbientResidual<S>& r, int n, int K) {
  std::vector<ComponentCheck> out;
  auto add = [&](const std::string& name, const Jet<S>& j) {
    ComponentCheck c;
    c.name = name;
    c.verified_through = std::min(K - 1, j.valid_u());
    c.max_abs = j.max_abs_below_u(c.verified_through + 1);
    out.push_back(c);
  };
  const int inf = n + 1;
  auto label = [&](int I) { return I == 0 ? std::string("0") : I == inf ? std::string("inf") : std::to_string(I); };
  for (int I = 0; I <= inf; ++I)
    for (int J = I; J <= inf; ++J) add("P[" + label(I) + "," + label(J) + "]", r.P(I, J));
  for (int I = 0; I <= inf; ++I)
    for (int J = I; J <= inf; ++J) add("Pv[" + label(I) + "," + label(J) + "]", r.P_v(I, J));
  add("F", r.F);
  add("F_v", r.F_v);
  add("F_vv", r.F_vv);
  return out;
}

inline double max_component(const std::vector<ComponentCheck>& cs) {
  double m = 0;
  for (const auto& c : cs) m = std::max(m, c.max_abs);
  return m;
}

}  // namespace amb
