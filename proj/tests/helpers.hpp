// Small builders shared by the unit tests.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "amb/scenario.hpp"

namespace amb::test {

inline JetSpec spec(int n, int D, int K, CoeffMode mode = CoeffMode::Rational) {
  JetSpec s;
  s.n_vars = n;
  s.spatial_degree = D;
  s.u_order = K;
  s.mode = mode;
  return s;
}

inline Chart chart(int n, Topology t = Topology::Plane) {
  Chart c;
  c.n = n;
  c.topology = t;
  for (int i = 0; i < n; ++i) c.names.push_back("x" + std::to_string(i + 1));
  c.base.assign(n, Q(0));
  return c;
}

template <class S>
Jet<S> parse(const std::string& text, const JetSpec& sp) {
  std::vector<std::string> names;
  for (int i = 0; i < sp.n_vars; ++i) names.push_back("x" + std::to_string(i + 1));
  names.push_back("u");
  std::vector<S> base(sp.n_vars + 1, S(0));
  JetSpec wide = sp;
  wide.n_vars = sp.n_vars + 1;  // u as a plain variable, then relabelled
  wide.spatial_degree = sp.spatial_degree + sp.u_order;
  wide.u_order = 0;
  Jet<S> j = field_to_jet(parse_expr(text, names), wide, base);
  Jet<S> out(sp);
  for (const auto& t : j.terms()) {
    std::vector<int> e(sp.n_vars + 1);
    for (int v = 0; v <= sp.n_vars; ++v) e[v] = mono_exp(t.first.key, v);
    out = out + Jet<S>::monomial(sp, e, t.second);
  }
  return out;
}

// Random jet with small integer coefficients and a unit constant term.
template <class S>
Jet<S> random_jet(const JetSpec& sp, std::mt19937_64& rng, int terms = 6) {
  std::uniform_int_distribution<int> c(-5, 5), d(0, 2);
  Jet<S> j = Jet<S>::constant(sp, S(1));
  for (int t = 0; t < terms; ++t) {
    std::vector<int> e(sp.n_vars + 1);
    int deg = 0;
    for (int v = 0; v <= sp.n_vars; ++v) deg += e[v] = d(rng);
    if (deg == 0) continue;
    j = j + Jet<S>::monomial(sp, e, Scalar<S>::from_q(Q(c(rng), 3)));
  }
  return j;
}

template <class S>
bool same(const Jet<S>& a, const Jet<S>& b, double tol = 0) {
  return (a - b).max_abs() <= tol;
}

}  // namespace amb::test
