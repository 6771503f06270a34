// Gradient Ricci flow read off the ambient expansion: Lie derivatives along
// X = (v_1)_u d_v - d_u (lambda = 0) and its lambda > 0 analogue, evolution of
// the p_k, and the exact Einstein sign table.
#pragma once

#include <vector>

#include "amb/volume.hpp"

namespace amb {

template <class S>
MetricJets<S> family_at_u(const AmbientExpansion<S>& e) {
  MetricJets<S> m;
  m.g = e.g_u();
  m.phi = e.phi_u();
  m.lambda = e.lambda();
  return m;
}

// L_X g_u + 2 Ric_phi(u), L_X phi~ + R_u + lap phi_u, and the density of
// L_X[e^{-phi~} dvol], all as u-series at v = 0.
template <class S>
struct FFlowResidual {
  Mat<S> metric;
  Jet<S> density, measure;
  double max_abs() const { return std::max({metric.max_abs(), density.max_abs(), measure.max_abs()}); }
};

template <class S>
FFlowResidual<S> f_flow_residual(const AmbientExpansion<S>& e) {
  if (!Scalar<S>::is_zero(e.lambda())) throw std::invalid_argument("f_flow_residual: lambda must be 0");
  if (e.K < 2) throw std::invalid_argument("f_flow_residual: K >= 2");
  const int n = e.n();
  auto fam = family_at_u(e);
  auto w = weighted_invariants(fam);
  Mat<S> gp = e.g_u();
  for (auto& c : gp.c) c = c.du();
  Jet<S> phip = fam.phi.du();
  Jet<S> Xv = w.R_phi.scaled(S(1) / S(2));
  FFlowResidual<S> r;
  r.metric = Mat<S>(e.spec(), n, 2, Symmetry::Symmetric2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) r.metric(i, j) = r.metric(j, i) = -gp(i, j) + w.ric_phi(i, j).scaled(S(2));
  // L_X phi~ = X^v d_v phi~ + X^u d_u phi~ = -Xv - phi_u'
  r.density = -Xv - phip + w.R + w.lap_phi;
  // (X phi~ - div X) with div X = X^u d_u log sqrt(det g_u)
  r.measure = Xv + phip - trace(w.lc.ginv, gp).scaled(S(1) / S(2));
  return r;
}

// r_k(u) = L_X p_k - (-p_{k+1} + p_1 p_k) for the ambient extension
// p_k = d_u^k [e^{-phi~} sqrt|det g~|] normalised at the base, k = 1..K-1.
template <class S>
struct PkEvolution {
  std::vector<Jet<S>> residual;  // residual[k-1]
  Jet<S> k1_identity;            // -p_2 + p_1^2 - |P_phi|^2 at u = 0
  double max_abs() const {
    double m = k1_identity.max_abs();
    for (const auto& r : residual) m = std::max(m, r.max_abs());
    return m;
  }
};

template <class S>
PkEvolution<S> pk_evolution_check(const AmbientExpansion<S>& e, const VolumeSeries<S>& vs) {
  if (!Scalar<S>::is_zero(e.lambda())) throw std::invalid_argument("pk_evolution_check: lambda must be 0");
  if (e.K < 2) throw std::invalid_argument("pk_evolution_check: K >= 2");
  auto am = ambient_assemble(e);
  auto w_u = weighted_invariants(family_at_u(e));
  Jet<S> Xv = w_u.R_phi.scaled(S(1) / S(2));
  Jet<S> dv_log = -am.B;  // d_v log e^{-phi~}
  const Jet<S>& psi = vs.v_series;
  Jet<S> p1hat = psi.du() * psi.invert();
  std::vector<Jet<S>> Pk{psi};
  for (int k = 1; k <= e.K; ++k) Pk.push_back(Pk.back().du());
  PkEvolution<S> out;
  for (int k = 1; k <= e.K - 1; ++k) {
    Jet<S> lx = Xv * dv_log * Pk[k] - Pk[k].du();
    Jet<S> rhs = -Pk[k + 1] + p1hat * Pk[k];
    out.residual.push_back(lx - rhs);
  }
  auto w0 = weighted_invariants(e.base);
  Jet<S> P2 = contract2(w0.lc.ginv, w0.P, w0.P);
  out.k1_identity = -vs.p.at(2) + vs.p.at(1) * vs.p.at(1) - P2;
  return out;
}

// lambda > 0: along X = (1 - lambda u)^{-1} (v_1)_u d_v - (1 - lambda u) d_u,
//   metric  = L_X g_u + 2 P_phi(u)
//   density = L_X phi~ + R_u + lap phi_u - n lambda
// Both vanish as u-series, not only at u = 0.
template <class S>
struct WFlowResidual {
  Mat<S> metric;
  Jet<S> density;
  double at_base() const {
    double m = std::abs(Scalar<S>::to_double(density.constant_term()));
    for (const auto& c : metric.c) m = std::max(m, std::abs(Scalar<S>::to_double(c.constant_term())));
    return m;
  }
  double max_abs() const { return std::max(metric.max_abs(), density.max_abs()); }
};

template <class S>
WFlowResidual<S> w_flow_residual(const AmbientExpansion<S>& e) {
  if (!(Scalar<S>::to_double(e.lambda()) > 0)) throw std::invalid_argument("w_flow_residual: need lambda = 1/(2 tau) > 0");
  if (e.K < 2) throw std::invalid_argument("w_flow_residual: K >= 2");
  const int n = e.n();
  const S lam = e.lambda();
  auto fam = family_at_u(e);
  auto w = weighted_invariants(fam);
  Jet<S> a = Jet<S>::u(e.spec()).scaled(-lam).plus_constant(S(1));  // 1 - lambda u
  Mat<S> gu = e.g_u();
  WFlowResidual<S> r;
  r.metric = Mat<S>(e.spec(), n, 2, Symmetry::Symmetric2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) r.metric(i, j) = r.metric(j, i) = -(a * gu(i, j).du()) + w.P(i, j).scaled(S(2));
  Jet<S> Xv = w.R_phi.scaled(S(1) / S(2));
  r.density = (-Xv - a * fam.phi.du() + w.R + w.lap_phi).plus_constant(-Scalar<S>::from_int(n) * lam);
  return r;
}

// Deviation of the solved expansion for (c g, phi, lambda / c) from the
// rescaling law g_m -> c^{1-m} g_m, phi_m -> c^{-m} phi_m (u scales by c).
template <class S>
double rescaling_deviation(const MetricJets<S>& base, int K, const S& c, AmbientConvention conv = {}) {
  auto e0 = solve_ambient(base, K, conv);
  MetricJets<S> scaled = base;
  scaled.g = mat_scale(base.g, c);
  scaled.lambda = base.lambda / c;
  auto e1 = solve_ambient(scaled, K, conv);
  double dev = 0;
  S cp = c;  // c^{1-m}, starting at m = 0
  S cm = 1;  // c^{-m}
  for (int m = 0; m <= K; ++m) {
    Mat<S> d = mat_add(e1.g_coeffs[m], e0.g_coeffs[m], S(-cp));
    dev = std::max(dev, d.max_abs());
    dev = std::max(dev, (e1.phi_coeffs[m] - e0.phi_coeffs[m].scaled(cm)).max_abs());
    cp = cp / c;
    cm = cm / c;
  }
  return dev;
}

// One row of the Einstein table: v_k = mu^k prod_{j<k}(n - 4j) / k!, the rate
// dF_k/dt = (1/k!) (-p_{k+1} + p_1 p_k) Vol, and the verdict predicted from
// where n sits between multiples of 4.
struct EinsteinRow {
  int n = 0, k = 0;
  Q v_k, rate;  // rate per unit weighted volume
  int sign_product = 0;
  int predicted = 0;  // +1 increasing, -1 decreasing, 0 constant zero
  bool agrees() const { return sgn(rate) == predicted && sgn(v_k) == sign_product; }
};

std::vector<EinsteinRow> einstein_sign_table(int n, const Q& mu, int k_max);

}  // namespace amb
