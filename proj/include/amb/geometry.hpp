// Curvature and weighted invariants of a manifold with density, evaluated as
// jets at a chart base point.  Functions take a Frame so that the same code
// serves the ambient chart, whose v direction carries no dependence.
#pragma once

#include <string>
#include <vector>

#include "amb/expr.hpp"
#include "amb/tensor.hpp"

namespace amb {

template <class S>
struct LeviCivita {
  Frame fr;
  Mat<S> g, ginv;
  TensorJet<S> gamma;  // gamma(k, i, j) = Gamma^k_ij
};

template <class S>
LeviCivita<S> levi_civita(const Mat<S>& g, const Frame& fr) {
  const int N = fr.dim;
  const JetSpec& spec = g.c[0].spec();
  LeviCivita<S> lc;
  lc.fr = fr;
  lc.g = g;
  lc.ginv = inverse(g);
  TensorJet<S> dg(spec, N, 3);  // dg(I, a, b) = d_I g_ab
  for (int I = 0; I < N; ++I)
    for (int a = 0; a < N; ++a)
      for (int b = a; b < N; ++b) {
        if (g(a, b).is_zero() || fr.dvar[I] < 0) continue;
        dg(I, a, b) = dd(g(a, b), fr, I);
        dg(I, b, a) = dg(I, a, b);
      }
  TensorJet<S> low(spec, N, 3);  // low(l, i, j) = Gamma_{l i j}
  const S half = S(1) / S(2);
  for (int l = 0; l < N; ++l)
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        Jet<S> s = dg(i, j, l) + dg(j, i, l) - dg(l, i, j);
        if (s.is_zero()) continue;
        low(l, i, j) = s.scaled(half);
        low(l, j, i) = low(l, i, j);
      }
  lc.gamma = TensorJet<S>(spec, N, 3, Symmetry::None, {true, false, false});
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        Jet<S> s = Jet<S>::zero(spec);
        for (int l = 0; l < N; ++l)
          if (!low(l, i, j).is_zero()) add_prod(s, lc.ginv(k, l), low(l, i, j));
        lc.gamma(k, i, j) = s;
        lc.gamma(k, j, i) = s;
      }
  return lc;
}

// Ric_jk = d_i G^i_jk - d_j G^i_ik + G^i_im G^m_jk - G^i_jm G^m_ik.
// mask(j,k) selects the components to compute (null: all).
template <class S>
Mat<S> ricci(const LeviCivita<S>& lc, const std::vector<std::vector<bool>>* mask = nullptr) {
  const int N = lc.fr.dim;
  const JetSpec& spec = lc.g.c[0].spec();
  const auto& G = lc.gamma;
  std::vector<Jet<S>> tr(N, Jet<S>::zero(spec));  // G^i_im
  for (int m = 0; m < N; ++m)
    for (int i = 0; i < N; ++i)
      if (!G(i, i, m).is_zero()) tr[m] += G(i, i, m);
  Mat<S> ric(spec, N, 2, Symmetry::Symmetric2);
  for (int j = 0; j < N; ++j)
    for (int k = j; k < N; ++k) {
      if (mask && !(*mask)[j][k]) continue;
      Jet<S> s = Jet<S>::zero(spec);
      for (int i = 0; i < N; ++i)
        if (!G(i, j, k).is_zero() && lc.fr.dvar[i] >= 0) s += dd(G(i, j, k), lc.fr, i);
      if (!tr[k].is_zero() && lc.fr.dvar[j] >= 0) s -= dd(tr[k], lc.fr, j);
      for (int m = 0; m < N; ++m) add_prod(s, tr[m], G(m, j, k));
      for (int i = 0; i < N; ++i)
        for (int m = 0; m < N; ++m)
          if (!G(i, j, m).is_zero() && !G(m, i, k).is_zero()) s -= G(i, j, m) * G(m, i, k);
      ric(j, k) = s;
      ric(k, j) = s;
    }
  return ric;
}

// R^l_{ijk} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
template <class S>
Jet<S> riemann_up(const LeviCivita<S>& lc, int l, int i, int j, int k) {
  const int N = lc.fr.dim;
  const auto& G = lc.gamma;
  Jet<S> s = Jet<S>::zero(lc.g.c[0].spec());
  if (!G(l, j, k).is_zero() && lc.fr.dvar[i] >= 0) s += dd(G(l, j, k), lc.fr, i);
  if (!G(l, i, k).is_zero() && lc.fr.dvar[j] >= 0) s -= dd(G(l, i, k), lc.fr, j);
  for (int m = 0; m < N; ++m) {
    add_prod(s, G(l, i, m), G(m, j, k));
    sub_prod(s, G(l, j, m), G(m, i, k));
  }
  return s;
}

// Rm_{ijkl} = g_{lm} R^m_{ijk}; with this convention Ric_jk = g^{il} Rm_{ijkl}.
template <class S>
TensorJet<S> riemann(const LeviCivita<S>& lc) {
  const int N = lc.fr.dim;
  const JetSpec& spec = lc.g.c[0].spec();
  TensorJet<S> rm(spec, N, 4, Symmetry::Riemann);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        std::vector<Jet<S>> up(N, Jet<S>::zero(spec));
        for (int m = 0; m < N; ++m) up[m] = riemann_up(lc, m, i, j, k);
        for (int l = 0; l < N; ++l) {
          Jet<S> s = Jet<S>::zero(spec);
          for (int m = 0; m < N; ++m) add_prod(s, lc.g(l, m), up[m]);
          rm(i, j, k, l) = s;
          rm(j, i, k, l) = -s;
        }
      }
  return rm;
}

template <class S>
std::vector<Jet<S>> gradient(const Jet<S>& f, const Frame& fr) {
  std::vector<Jet<S>> d;
  for (int i = 0; i < fr.dim; ++i) d.push_back(dd(f, fr, i));
  return d;
}

template <class S>
Mat<S> hessian(const LeviCivita<S>& lc, const Jet<S>& f) {
  const int N = lc.fr.dim;
  const JetSpec& spec = f.spec();
  auto df = gradient(f, lc.fr);
  Mat<S> h(spec, N, 2, Symmetry::Symmetric2);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      Jet<S> s = df[i].is_zero() ? Jet<S>::zero(spec).restricted(f.valid_weight() - 2, f.valid_u())
                                 : dd(df[i], lc.fr, j);
      for (int k = 0; k < N; ++k) sub_prod(s, lc.gamma(k, i, j), df[k]);
      h(i, j) = s;
      h(j, i) = s;
    }
  return h;
}

template <class S>
Jet<S> inner(const Mat<S>& ginv, const std::vector<Jet<S>>& a, const std::vector<Jet<S>>& b) {
  Jet<S> r = Jet<S>::zero(ginv.c[0].spec());
  for (int i = 0; i < ginv.dim; ++i)
    for (int j = 0; j < ginv.dim; ++j)
      if (!a[i].is_zero() && !b[j].is_zero()) add_prod(r, ginv(i, j), a[i] * b[j]);
  return r;
}

template <class S>
std::vector<Jet<S>> raise(const Mat<S>& ginv, const std::vector<Jet<S>>& a) {
  std::vector<Jet<S>> r(ginv.dim, Jet<S>::zero(ginv.c[0].spec()));
  for (int i = 0; i < ginv.dim; ++i)
    for (int j = 0; j < ginv.dim; ++j) add_prod(r[i], ginv(i, j), a[j]);
  return r;
}

// nabla_k T_ij, stored at (k, i, j)
template <class S>
TensorJet<S> covariant_d2(const LeviCivita<S>& lc, const Mat<S>& t) {
  const int N = lc.fr.dim;
  const JetSpec& spec = t.c[0].spec();
  const auto& G = lc.gamma;
  TensorJet<S> r(spec, N, 3);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        Jet<S> s = dd(t(i, j), lc.fr, k);
        for (int m = 0; m < N; ++m) {
          sub_prod(s, G(m, k, i), t(m, j));
          sub_prod(s, G(m, k, j), t(i, m));
        }
        r(k, i, j) = s;
      }
  return r;
}

// nabla_l A_kij, stored at (l, k, i, j)
template <class S>
TensorJet<S> covariant_d3(const LeviCivita<S>& lc, const TensorJet<S>& a) {
  const int N = lc.fr.dim;
  const JetSpec& spec = a.c[0].spec();
  const auto& G = lc.gamma;
  TensorJet<S> r(spec, N, 4);
  for (int l = 0; l < N; ++l)
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          Jet<S> s = dd(a(k, i, j), lc.fr, l);
          for (int m = 0; m < N; ++m) {
            sub_prod(s, G(m, l, k), a(m, i, j));
            sub_prod(s, G(m, l, i), a(k, m, j));
            sub_prod(s, G(m, l, j), a(k, i, m));
          }
          r(l, k, i, j) = s;
        }
  return r;
}

// Jet-level manifold with density (g, phi, lambda).
template <class S>
struct MetricJets {
  Mat<S> g;
  Jet<S> phi;
  S lambda;
  int dim() const { return g.dim; }
};

template <class S>
struct Invariants {
  LeviCivita<S> lc;
  Mat<S> ric, hess_phi, ric_phi, P;
  Jet<S> R, R_phi, F, Y, lap_phi, grad_phi_sq;
  std::vector<Jet<S>> dphi;
};

template <class S>
Invariants<S> weighted_invariants(const MetricJets<S>& mm) {
  const int n = mm.dim();
  const S lam = mm.lambda;
  const S nn = Scalar<S>::from_int(n);
  Invariants<S> w;
  w.lc = levi_civita(mm.g, Frame::spatial(n));
  w.ric = ricci(w.lc);
  w.R = trace(w.lc.ginv, w.ric);
  w.dphi = gradient(mm.phi, w.lc.fr);
  w.hess_phi = hessian(w.lc, mm.phi);
  w.lap_phi = trace(w.lc.ginv, w.hess_phi);
  w.grad_phi_sq = inner(w.lc.ginv, w.dphi, w.dphi);
  w.ric_phi = mat_add(w.ric, w.hess_phi);
  w.P = mat_add(w.ric_phi, mm.g, S(-lam));
  // R_phi = R + 2 lap - |dphi|^2 + 2 lam (phi - n)
  w.R_phi = w.R + w.lap_phi.scaled(S(2)) - w.grad_phi_sq + (mm.phi.plus_constant(S(-nn))).scaled(S(2) * lam);
  // F = lap - |dphi|^2 + 2 lam phi - n lam
  w.F = (w.lap_phi - w.grad_phi_sq + mm.phi.scaled(S(2) * lam)).plus_constant(S(-nn * lam));
  // Y = -1/2 (R + |dphi|^2 - 2 lam phi)
  w.Y = (w.R + w.grad_phi_sq - mm.phi.scaled(S(2) * lam)).scaled(S(-1) / S(2));
  return w;
}

// Drift Laplacian: lap f - <grad phi, grad f>.
template <class S>
Jet<S> weighted_laplacian(const MetricJets<S>& mm, const LeviCivita<S>& lc, const Jet<S>& f) {
  Jet<S> lap = trace(lc.ginv, hessian(lc, f));
  return lap - inner(lc.ginv, gradient(mm.phi, lc.fr), gradient(f, lc.fr));
}

// (delta_phi T)_i = g^{kl} nabla_k T_li - (grad phi)^k T_ki
template <class S>
std::vector<Jet<S>> weighted_divergence(const LeviCivita<S>& lc, const std::vector<Jet<S>>& dphi, const Mat<S>& t) {
  const int N = lc.fr.dim;
  auto nt = covariant_d2(lc, t);
  auto up = raise(lc.ginv, dphi);
  std::vector<Jet<S>> r(N, Jet<S>::zero(t.c[0].spec()));
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) add_prod(r[i], lc.ginv(k, l), nt(k, l, i));
    for (int k = 0; k < N; ++k) sub_prod(r[i], up[k], t(k, i));
  }
  return r;
}

// Weighted Bach tensor
//   B_ij = g^{kl} nabla_l (dP)_kij - (grad phi)^k (dP)_kij + Rm_{kijl} P^{kl}
// with (dP)_kij = nabla_k P_ij - nabla_i P_kj.  The curvature term is the
// contraction in which Rm(e_k, X, e_k, Y) = +Ric(X, Y); with our index order that
// is slots 1 and 4.
template <class S>
Mat<S> weighted_bach(const MetricJets<S>& mm, const Invariants<S>& w) {
  const int n = mm.dim();
  const JetSpec& spec = mm.phi.spec();
  const auto& lc = w.lc;
  auto nP = covariant_d2(lc, w.P);
  TensorJet<S> dP(spec, n, 3);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dP(k, i, j) = nP(k, i, j) - nP(i, k, j);
  auto ndP = covariant_d3(lc, dP);
  auto rm = riemann(lc);
  auto up = raise(lc.ginv, w.dphi);
  Mat<S> Pup = mat_mul(mat_mul(lc.ginv, w.P), lc.ginv);  // P^{ab}
  Mat<S> B(spec, n, 2, Symmetry::Symmetric2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet<S> s = Jet<S>::zero(spec);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          add_prod(s, lc.ginv(k, l), ndP(l, k, i, j));
          add_prod(s, rm(k, i, j, l), Pup(k, l));
        }
      for (int k = 0; k < n; ++k) sub_prod(s, up[k], dP(k, i, j));
      B(i, j) = s;
      B(j, i) = s;
    }
  return B;
}

// 2 delta_phi P_phi - grad R_phi.  For lambda = 0 this is the usual
// 2 delta_phi Ric_phi - grad R_phi.
template <class S>
std::vector<Jet<S>> bianchi_residual(const MetricJets<S>& mm, const Invariants<S>& w) {
  auto div = weighted_divergence(w.lc, w.dphi, w.P);
  auto dR = gradient(w.R_phi, w.lc.fr);
  std::vector<Jet<S>> r;
  for (int i = 0; i < mm.dim(); ++i) r.push_back(div[i].scaled(S(2)) - dR[i]);
  return r;
}

// Residuals of the four transformation laws under phi -> phi + omega.
template <class S>
struct ConformalShiftCheck {
  MetricJets<S> shifted;
  Jet<S> res_R, res_F, res_Y;
  Mat<S> res_ric;
  double max_abs() const {
    return std::max({res_R.max_abs(), res_F.max_abs(), res_Y.max_abs(), res_ric.max_abs()});
  }
};

template <class S>
ConformalShiftCheck<S> conformal_shift(const MetricJets<S>& mm, const Jet<S>& omega) {
  ConformalShiftCheck<S> out;
  out.shifted = mm;
  out.shifted.phi = mm.phi + omega;
  auto w0 = weighted_invariants(mm);
  auto w1 = weighted_invariants(out.shifted);
  const S lam = mm.lambda;
  auto dom = gradient(omega, w0.lc.fr);
  Jet<S> lap_om = trace(w0.lc.ginv, hessian(w0.lc, omega));
  Jet<S> cross = inner(w0.lc.ginv, w0.dphi, dom);
  Jet<S> om2 = inner(w0.lc.ginv, dom, dom);
  // Signs follow from expanding |d(phi + omega)|^2 in each definition.
  Jet<S> R_law = w0.R_phi + lap_om.scaled(S(2)) - cross.scaled(S(2)) - om2 + omega.scaled(S(2) * lam);
  Jet<S> F_law = w0.F + lap_om - cross.scaled(S(2)) - om2 + omega.scaled(S(2) * lam);
  Jet<S> Y_law = w0.Y - (om2 + cross.scaled(S(2)) - omega.scaled(S(2) * lam)).scaled(S(1) / S(2));
  Mat<S> ric_law = mat_add(w0.ric_phi, hessian(w0.lc, omega));
  out.res_R = w1.R_phi - R_law;
  out.res_F = w1.F - F_law;
  out.res_Y = w1.Y - Y_law;
  out.res_ric = mat_add(w1.ric_phi, ric_law, S(-1));
  return out;
}

}  // namespace amb
