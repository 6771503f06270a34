// Ambient curvature, the tensors Lambda^(k)_ij = R~_{inf i j inf; inf...inf}
// (k-1 covariant u-derivatives) with Omega^(k) = Lambda^(k) at u = 0, and the
// series identities linking them to the u-derivatives of g_u and phi_u.
#pragma once

#include <vector>

#include "amb/ambient.hpp"
#include "amb/volume.hpp"

namespace amb {

// Full curvature of the assembled ambient metric in the index order where
// contracting slots 1 and 3 gives +Ric, i.e. R~_{IJKL} = Rm_{IJLK} with Rm from
// riemann().  Omega and Lambda below use this order.
template <class S>
TensorJet<S> curvature_13(const TensorJet<S>& rm) {
  const int N = rm.dim;
  TensorJet<S> r = rm;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) r(a, b, c, d) = rm(a, b, d, c);
  return r;
}

template <class S>
TensorJet<S> ambient_riemann(const AmbientMetric<S>& am) {
  return curvature_13(riemann(levi_civita(am.G, am.fr)));
}

// nabla_inf of a rank-4 ambient tensor, using the Christoffel symbols of the
// assembled metric.  Since the u-lines are geodesics (Gamma^M_{inf inf} = 0,
// checked in the tests) iterating this gives the iterated covariant derivative.
template <class S>
TensorJet<S> nabla_inf(const LeviCivita<S>& lc, const TensorJet<S>& t) {
  const int N = lc.fr.dim, inf = N - 1;
  TensorJet<S> r = t;
  const auto& G = lc.gamma;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          Jet<S> s = dd(t(a, b, c, d), lc.fr, inf);
          for (int m = 0; m < N; ++m) {
            sub_prod(s, G(m, inf, a), t(m, b, c, d));
            sub_prod(s, G(m, inf, b), t(a, m, c, d));
            sub_prod(s, G(m, inf, c), t(a, b, m, d));
            sub_prod(s, G(m, inf, d), t(a, b, c, m));
          }
          r(a, b, c, d) = s;
        }
  return r;
}

template <class S>
struct ObstructionSet {
  AmbientExpansion<S> expansion;
  std::vector<Mat<S>> Lambda;  // Lambda[k] for k = 1..kmax as u-series; Lambda[0] unused
  std::vector<Mat<S>> Omega;   // Omega[k] = Lambda[k] at u = 0
  double max_gamma_inf_inf = 0;  // |Gamma^M_{inf inf}|, zero in normal form
};

template <class S>
ObstructionSet<S> obstruction_set(const AmbientExpansion<S>& e, int kmax = -1) {
  if (kmax < 0) kmax = e.K - 1;
  if (kmax > e.K - 1) throw BudgetExhausted("obstruction_set: Omega^(k) needs expansion order >= k+1");
  const int n = e.n();
  const JetSpec& spec = e.spec();
  ObstructionSet<S> os;
  os.expansion = e;
  auto am = ambient_assemble(e);
  auto lc = levi_civita(am.G, am.fr);
  const int inf = n + 1;
  for (int m = 0; m < n + 2; ++m) os.max_gamma_inf_inf = std::max(os.max_gamma_inf_inf, lc.gamma(m, inf, inf).max_abs());
  TensorJet<S> t = curvature_13(riemann(lc));
  os.Lambda.assign(1, Mat<S>());
  os.Omega.assign(1, Mat<S>());
  for (int k = 1; k <= kmax; ++k) {
    if (k > 1) t = nabla_inf(lc, t);
    Mat<S> L(spec, n, 2, Symmetry::Symmetric2);
    Mat<S> O(spec, n, 2, Symmetry::Symmetric2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        L(i, j) = t(inf, i + 1, j + 1, inf);
        O(i, j) = L(i, j).u_coeff(0);
      }
    os.Lambda.push_back(L);
    os.Omega.push_back(O);
  }
  return os;
}

template <class S>
Mat<S> extended_obstruction(const ObstructionSet<S>& os, int k) {
  if (k < 1 || k >= static_cast<int>(os.Omega.size()))
    throw BudgetExhausted("extended_obstruction: order not available");
  return os.Omega[k];
}

// Residuals of the four series identities, each reported as the largest
// coefficient over the u-orders where both sides are determined.
struct RecursionResiduals {
  std::vector<double> lambda_derivative;  // index k = 1..kmax-1
  double g_second = 0;                    // g'' - 2 Lambda1 - 1/2 g' g^-1 g'
  double g_inverse = 0;                   // (g^-1)' + g^-1 g' g^-1
  double phi_second = 0;                  // phi'' - g^ij Lambda1_ij
  double reconstruct_g = 0;               // u-coefficients of g rebuilt from (P, Omega)
  double reconstruct_phi = 0;             // same for phi from (Y, Omega)
  double max() const {
    double m = std::max({g_second, g_inverse, phi_second, reconstruct_g, reconstruct_phi});
    for (double x : lambda_derivative) m = std::max(m, x);
    return m;
  }
};

namespace detail {
template <class S>
double mat_series_max(const Mat<S>& m) {
  double r = 0;
  for (const auto& j : m.c) r = std::max(r, j.max_abs_below_u(j.valid_u() + 1));
  return r;
}
// g^{lm} g'_{m(i} T_{j)l}
template <class S>
Mat<S> sym_contract(const Mat<S>& ginv, const Mat<S>& gp, const Mat<S>& t) {
  Mat<S> a = mat_mul(mat_mul(t, ginv), gp);  // T_il g^lm g'_mj
  Mat<S> r = a;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) r(i, j) = (a(i, j) + a(j, i)).scaled(S(1) / S(2));
  return r;
}
template <class S>
Mat<S> mat_du(const Mat<S>& m) {
  Mat<S> r = m;
  for (auto& j : r.c) j = j.du();
  return r;
}
}  // namespace detail

template <class S>
RecursionResiduals recursion_check(const ObstructionSet<S>& os) {
  using detail::mat_du;
  const auto& e = os.expansion;
  const int n = e.n();
  const JetSpec& spec = e.spec();
  const int kmax = static_cast<int>(os.Lambda.size()) - 1;
  if (kmax < 1) throw BudgetExhausted("recursion_check: needs expansion order >= 2");
  RecursionResiduals r;
  Mat<S> g = e.g_u();
  Mat<S> gi = inverse(g);
  Mat<S> gp = mat_du(g);
  for (int k = 1; k < kmax; ++k) {
    Mat<S> lhs = mat_du(os.Lambda[k]);
    Mat<S> rhs = mat_add(os.Lambda[k + 1], detail::sym_contract(gi, gp, os.Lambda[k]));
    r.lambda_derivative.push_back(detail::mat_series_max(mat_add(lhs, rhs, S(-1))));
  }
  Mat<S> gpp = mat_du(gp);
  Mat<S> quad = mat_scale(mat_sandwich(gp, gi, gp), S(1) / S(2));
  r.g_second = detail::mat_series_max(mat_add(gpp, mat_add(mat_scale(os.Lambda[1], S(2)), quad), S(-1)));
  Mat<S> gip = mat_du(gi);
  r.g_inverse = detail::mat_series_max(mat_add(gip, mat_sandwich(gi, gp, gi)));
  Jet<S> phipp = e.phi_u().du().du();
  Jet<S> trL = trace(gi, os.Lambda[1]);
  Jet<S> d = phipp - trL;
  r.phi_second = d.max_abs_below_u(d.valid_u() + 1);

  // Rebuild the Taylor coefficients of (g_u, phi_u) from g, g'(0) = 2P,
  // phi'(0) = -Y and Omega^(1..kmax) alone, by Picard iteration of
  //   g'' = 2 L1 + 1/2 g' g^-1 g',  L_k' = L_{k+1} + g^{lm} g'_{m(i} L_k_{j)l},
  //   phi'' = g^ij L1_ij,  with L_{kmax+1} := 0 (it only enters beyond the
  // orders compared below).
  auto w = weighted_invariants(e.base);
  const int K = kmax + 1;
  Mat<S> G = mat_add(e.base.g, mat_scale(w.P, Jet<S>::u(spec).scaled(S(2))));
  std::vector<Mat<S>> L(kmax + 2, Mat<S>(spec, n, 2, Symmetry::Symmetric2));
  for (int k = 1; k <= kmax; ++k) L[k] = os.Omega[k];
  auto integrate = [&](const Mat<S>& m, const Mat<S>& c0) {
    Mat<S> out = c0;
    for (size_t q = 0; q < out.c.size(); ++q) out.c[q] += m.c[q].u_integral();
    return out;
  };
  for (int it = 0; it <= K + 1; ++it) {
    Mat<S> Gi = inverse(G), Gp = mat_du(G);
    Mat<S> gpp_rhs = mat_add(mat_scale(L[1], S(2)), mat_scale(mat_sandwich(Gp, Gi, Gp), S(1) / S(2)));
    std::vector<Mat<S>> Ln(L.size(), Mat<S>(spec, n, 2, Symmetry::Symmetric2));
    for (int k = 1; k <= kmax; ++k)
      Ln[k] = integrate(mat_add(L[k + 1], detail::sym_contract(Gi, Gp, L[k])), os.Omega[k]);
    Mat<S> Gp_new = integrate(gpp_rhs, mat_scale(w.P, S(2)));
    G = integrate(Gp_new, e.base.g);
    L = Ln;
    for (auto& m : L)
      for (auto& j : m.c) j = j.restricted(j.valid_weight(), std::min(j.valid_u(), K));
    for (auto& j : G.c) j = j.restricted(j.valid_weight(), std::min(j.valid_u(), K));
  }
  Mat<S> Gi = inverse(G);
  Jet<S> phipp_rec = trace(Gi, L[1]);
  Jet<S> phi_rec = e.base.phi + (phipp_rec.u_integral() + (-w.Y)).u_integral();
  for (int m = 1; m <= K; ++m) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (m > G(i, j).valid_u()) continue;
        r.reconstruct_g = std::max(r.reconstruct_g, (G(i, j).u_coeff(m) - e.g_coeffs[m](i, j)).max_abs());
      }
    if (m <= phi_rec.valid_u())
      r.reconstruct_phi = std::max(r.reconstruct_phi, (phi_rec.u_coeff(m) - e.phi_coeffs[m]).max_abs());
  }
  return r;
}

// Third-order trace identity at u = 0, lambda = 0.  Returns both the
// identity as usually displayed, 1/2 tr g''' - phi''' = 4 tr P^3, and the
// form obtained by differentiating the inf-inf equation,
// 1/2 tr g''' - phi''' = -4 <P, B>.
template <class S>
struct ThirdOrderTrace {
  Jet<S> lhs, displayed_rhs, derived_rhs;
  Jet<S> displayed_residual() const { return lhs - displayed_rhs; }
  Jet<S> derived_residual() const { return lhs - derived_rhs; }
};

template <class S>
ThirdOrderTrace<S> third_order_trace_check(const AmbientExpansion<S>& e) {
  if (e.K < 3) throw BudgetExhausted("third_order_trace_check: needs K >= 3");
  if (!Scalar<S>::is_zero(e.lambda())) throw std::invalid_argument("third_order_trace_check: lambda must be 0");
  auto w = weighted_invariants(e.base);
  const auto& gi = w.lc.ginv;
  ThirdOrderTrace<S> t;
  t.lhs = trace(gi, e.g_derivative(3)).scaled(S(1) / S(2)) - e.phi_derivative(3);
  Mat<S> P2 = mat_sandwich(w.P, gi, w.P);
  t.displayed_rhs = contract2(gi, P2, w.P).scaled(S(4));
  t.derived_rhs = contract2(gi, w.P, weighted_bach(e.base, w)).scaled(S(-4));
  return t;
}

}  // namespace amb
