// Renormalized volume v = exp(-(phi_u - phi)) (det g_u / det g)^{1/2}, its
// Taylor coefficients v_k, p_k = k! v_k, and the tensors L_k entering the
// conformal variation of v_k.
#pragma once

#include <vector>

#include "amb/ambient.hpp"

namespace amb {

template <class S>
struct VolumeSeries {
  Jet<S> v_series;
  std::vector<Jet<S>> v;  // v[k], u-independent jets
  std::vector<Jet<S>> p;  // p[k] = k! v[k]
  Mat<S> ginv_u;          // inverse of g_u, kept for the L tensors
};

template <class S>
VolumeSeries<S> volume_series(const AmbientExpansion<S>& e) {
  if (e.K < 1) throw std::invalid_argument("volume_series: expansion order must be >= 1");
  VolumeSeries<S> vs;
  Jet<S> det_u, det_0;
  Mat<S> gu = e.g_u();
  vs.ginv_u = inverse(gu, &det_u);
  inverse(e.g_coeffs[0], &det_0);
  Jet<S> ratio = det_u * det_0.invert();
  Jet<S> shift = e.phi_u() - e.phi_coeffs[0];
  vs.v_series = (-shift).exp() * ratio.sqrt();
  const int top = std::min(e.K, vs.v_series.valid_u());
  S fact = 1;
  for (int k = 0; k <= top; ++k) {
    if (k > 0) fact *= Scalar<S>::from_int(k);
    vs.v.push_back(vs.v_series.u_coeff(k));
    vs.p.push_back(vs.v.back().scaled(fact));
  }
  return vs;
}

// Residuals of the closed-form expressions of v_1, v_2, v_3 through P, B.
template <class S>
struct VFormulaResiduals {
  Jet<S> r1, r2, r3;
  bool has_r3 = false;
};

template <class S>
VFormulaResiduals<S> vk_formula_check(const AmbientExpansion<S>& e, const VolumeSeries<S>& vs) {
  auto w = weighted_invariants(e.base);
  const auto& gi = w.lc.ginv;
  const S half = S(1) / S(2);
  VFormulaResiduals<S> r;
  r.r1 = vs.v.at(1) - w.R_phi.scaled(half);
  Jet<S> P2 = contract2(gi, w.P, w.P);
  if (vs.v.size() > 2) r.r2 = vs.v[2] - (vs.v[1] * vs.v[1] - P2).scaled(half);
  if (vs.v.size() > 3) {
    Mat<S> B = weighted_bach(e.base, w);
    Mat<S> PgP = mat_sandwich(w.P, gi, w.P);
    Jet<S> trP3 = contract2(gi, PgP, w.P);
    Jet<S> v1 = vs.v[1];
    Jet<S> f3 = (v1 * v1 * v1 - (v1 * P2).scaled(S(3)) + trP3.scaled(S(2))).scaled(S(1) / S(6)) +
                contract2(gi, w.P, B).scaled(S(1) / S(3));
    r.r3 = vs.v[3] - f3;
    r.has_r3 = true;
  }
  return r;
}

// (L_k)^{ij} = coefficient of u^k in v(u) * int_0^u g^{ij}(s) ds.
template <class S>
Mat<S> l_tensor(const AmbientExpansion<S>& e, const VolumeSeries<S>& vs, int k) {
  if (k > e.K) throw std::invalid_argument("l_tensor: k exceeds the solved order");
  const int n = e.n();
  Mat<S> L(e.spec(), n, 2, Symmetry::Symmetric2, {true, true});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet<S> integ = vs.ginv_u(i, j).u_integral();
      Jet<S> c = integ.is_zero() ? Jet<S>::zero(e.spec()) : (vs.v_series * integ).u_coeff(k);
      L(i, j) = L(j, i) = c;
    }
  return L;
}

// Weighted divergence  nabla*_i X^i = nabla_i X^i - X^i d_i phi.
template <class S>
Jet<S> weighted_div_vector(const LeviCivita<S>& lc, const Jet<S>& phi, const std::vector<Jet<S>>& X) {
  const int n = lc.fr.dim;
  Jet<S> r = Jet<S>::zero(phi.spec());
  auto dphi = gradient(phi, lc.fr);
  for (int i = 0; i < n; ++i) {
    if (!X[i].is_zero()) r += dd(X[i], lc.fr, i);
    for (int k = 0; k < n; ++k) add_prod(r, lc.gamma(i, i, k), X[k]);
    sub_prod(r, X[i], dphi[i]);
  }
  return r;
}

// omega lambda v_{k-1} + nabla*_i [(L_k)^{ij} d_j omega]
template <class S>
Jet<S> conformal_variation_formula(const AmbientExpansion<S>& e, const VolumeSeries<S>& vs, const Jet<S>& omega,
                                   int k) {
  const int n = e.n();
  auto lc = levi_civita(e.base.g, Frame::spatial(n));
  Mat<S> L = l_tensor(e, vs, k);
  auto dom = gradient(omega, lc.fr);
  std::vector<Jet<S>> X(n, Jet<S>::zero(e.spec()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) add_prod(X[i], L(i, j), dom[j]);
  Jet<S> lhs = (omega * vs.v.at(k - 1)).scaled(e.lambda());
  return lhs + weighted_div_vector(lc, e.base.phi, X);
}

}  // namespace amb
