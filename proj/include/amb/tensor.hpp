// Dense tensors whose components are jets, plus the coordinate frame that maps
// tensor slots to jet variables.
#pragma once

#include <type_traits>
#include <vector>

#include "amb/jet.hpp"

namespace amb {

enum class Symmetry { None, Symmetric2, Riemann };

// Maps tensor index I to the jet variable used for d/dx^I; -1 marks a
// coordinate on which nothing depends (the ambient v direction).
struct Frame {
  int dim = 0;
  std::vector<int> dvar;
  static Frame spatial(int n) {
    Frame f;
    f.dim = n;
    for (int i = 0; i < n; ++i) f.dvar.push_back(i);
    return f;
  }
};

template <class S>
struct TensorJet {
  int dim = 0;
  int rank = 0;
  std::vector<bool> up;
  Symmetry sym = Symmetry::None;
  std::vector<Jet<S>> c;

  TensorJet() = default;
  TensorJet(const JetSpec& spec, int dim_, int rank_, Symmetry s = Symmetry::None, std::vector<bool> up_ = {})
      : dim(dim_), rank(rank_), up(up_.empty() ? std::vector<bool>(rank_, false) : up_), sym(s) {
    size_t sz = 1;
    for (int r = 0; r < rank; ++r) sz *= dim;
    c.assign(sz, Jet<S>::zero(spec));
  }
  Jet<S>& operator()(int i) { return c[i]; }
  const Jet<S>& operator()(int i) const { return c[i]; }
  Jet<S>& operator()(int i, int j) { return c[i * dim + j]; }
  const Jet<S>& operator()(int i, int j) const { return c[i * dim + j]; }
  Jet<S>& operator()(int i, int j, int k) { return c[(i * dim + j) * dim + k]; }
  const Jet<S>& operator()(int i, int j, int k) const { return c[(i * dim + j) * dim + k]; }
  Jet<S>& operator()(int i, int j, int k, int l) { return c[((i * dim + j) * dim + k) * dim + l]; }
  const Jet<S>& operator()(int i, int j, int k, int l) const { return c[((i * dim + j) * dim + k) * dim + l]; }

  double max_abs() const {
    double m = 0;
    for (const auto& j : c) m = std::max(m, j.max_abs());
    return m;
  }
  bool all_zero() const {
    for (const auto& j : c)
      if (!j.is_zero()) return false;
    return true;
  }
};

template <class S>
using Mat = TensorJet<S>;

// acc += a*b, skipping the product when either factor is identically zero but
// still narrowing acc's validity window.
template <class S>
inline void add_prod(Jet<S>& acc, const Jet<S>& a, const Jet<S>& b) {
  if (a.is_zero() || b.is_zero()) {
    auto [W, U] = Jet<S>::product_window(a, b);
    acc.restrict_window(W, U);
    return;
  }
  acc += a * b;
}
template <class S>
inline void sub_prod(Jet<S>& acc, const Jet<S>& a, const Jet<S>& b) {
  if (a.is_zero() || b.is_zero()) {
    auto [W, U] = Jet<S>::product_window(a, b);
    acc.restrict_window(W, U);
    return;
  }
  acc -= a * b;
}

template <class S>
inline Jet<S> dd(const Jet<S>& f, const Frame& fr, int I) {
  int v = fr.dvar[I];
  if (v < 0) return Jet<S>::zero(f.spec()).restricted(f.valid_weight(), f.valid_u());
  return f.partial(v);
}

template <class S>
Mat<S> mat_mul(const Mat<S>& a, const Mat<S>& b) {
  const int n = a.dim;
  Mat<S> r(a.c[0].spec(), n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) add_prod(r(i, j), a(i, k), b(k, j));
  return r;
}

template <class S>
Mat<S> mat_add(const Mat<S>& a, const Mat<S>& b, const std::type_identity_t<S>& sb = S(1)) {
  Mat<S> r = a;
  for (size_t i = 0; i < r.c.size(); ++i)
    if (!b.c[i].is_zero()) r.c[i] += b.c[i].scaled(sb);
  return r;
}

template <class S>
Mat<S> mat_scale(const Mat<S>& a, const std::type_identity_t<S>& s) {
  Mat<S> r = a;
  for (auto& j : r.c) j = j.scaled(s);
  return r;
}

template <class S>
Mat<S> mat_scale(const Mat<S>& a, const Jet<S>& s) {
  Mat<S> r = a;
  for (auto& j : r.c) {
    if (j.is_zero()) {
      auto [W, U] = Jet<S>::product_window(j, s);
      j.restrict_window(W, U);
    } else {
      j = j * s;
    }
  }
  return r;
}

// Gauss-Jordan elimination on jets, pivoting on constant terms.  Also returns
// the determinant when det != nullptr.
template <class S>
Mat<S> inverse(const Mat<S>& m, Jet<S>* det = nullptr) {
  using T = Scalar<S>;
  const int n = m.dim;
  const JetSpec& spec = m.c[0].spec();
  Mat<S> a = m;
  Mat<S> inv(spec, n, 2, m.sym);
  for (int i = 0; i < n; ++i) inv(i, i) = Jet<S>::constant(spec, S(1));
  Jet<S> d = Jet<S>::constant(spec, S(1));
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = 0;
    for (int r = col; r < n; ++r) {
      double v = std::abs(T::to_double(a(r, col).constant_term()));
      if (v > best) {
        best = v;
        piv = r;
        if (T::exact) break;
      }
    }
    if (piv < 0) throw SingularInput("singular metric at base point");
    if (piv != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(a(piv, k), a(col, k));
        std::swap(inv(piv, k), inv(col, k));
      }
      d = -d;
    }
    Jet<S> p = a(col, col);
    d = d * p;
    Jet<S> pinv = p.invert();
    for (int k = 0; k < n; ++k) {
      if (!a(col, k).is_zero()) a(col, k) = a(col, k) * pinv;
      if (!inv(col, k).is_zero()) inv(col, k) = inv(col, k) * pinv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      Jet<S> f = a(r, col);
      for (int k = 0; k < n; ++k) {
        sub_prod(a(r, k), f, a(col, k));
        sub_prod(inv(r, k), f, inv(col, k));
      }
    }
  }
  if (det) *det = d;
  return inv;
}

template <class S>
Jet<S> trace(const Mat<S>& ginv, const Mat<S>& t) {
  Jet<S> r = Jet<S>::zero(t.c[0].spec());
  for (int i = 0; i < t.dim; ++i)
    for (int j = 0; j < t.dim; ++j) add_prod(r, ginv(i, j), t(i, j));
  return r;
}

// <A,B> = g^{ik} g^{jl} A_ij B_kl
template <class S>
Jet<S> contract2(const Mat<S>& ginv, const Mat<S>& a, const Mat<S>& b) {
  Mat<S> ra = mat_mul(ginv, a), rb = mat_mul(ginv, b);
  Jet<S> r = Jet<S>::zero(a.c[0].spec());
  // tr(g^-1 A g^-1 B) for symmetric A, B
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) add_prod(r, ra(i, j), rb(j, i));
  return r;
}

// (A g^-1 B)_ij
template <class S>
Mat<S> mat_sandwich(const Mat<S>& a, const Mat<S>& ginv, const Mat<S>& b) {
  return mat_mul(mat_mul(a, ginv), b);
}

template <class S>
Mat<S> symmetrize(const Mat<S>& a) {
  Mat<S> r = a;
  for (int i = 0; i < a.dim; ++i)
    for (int j = i + 1; j < a.dim; ++j) {
      Jet<S> s = (a(i, j) + a(j, i)).scaled(S(1) / S(2));
      r(i, j) = s;
      r(j, i) = s;
    }
  r.sym = Symmetry::Symmetric2;
  return r;
}

}  // namespace amb
