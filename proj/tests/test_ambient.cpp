#include <doctest.h>

#include <Eigen/Dense>

#include "amb/checks.hpp"
#include "amb/obstruction.hpp"
#include "amb/volume.hpp"
#include "helpers.hpp"

using namespace amb;

namespace {

template <class S>
MetricJets<S> base(const MetricMeasure& mm, int K) {
  return to_jets<S>(mm, ambient_spec(mm.n(), K, 2 * K + 2, Scalar<S>::mode));
}

template <class S>
AmbientExpansion<S> solved(const MetricMeasure& mm, int K) {
  return solve_ambient(base<S>(mm, K), K);
}

MetricMeasure flat(int n, const std::string& phi, const std::string& lambda) {
  std::vector<std::string> e;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) e.push_back(i == j ? "1" : "0");
  return make_metric_measure(test::chart(n), e, phi, lambda);
}

template <class S>
double residual_of(const AmbientMetric<S>& am, int K) {
  return max_component(verify_residual(ambient_residual(am, AmbientConvention{}), am.n, K));
}

}  // namespace

TEST_CASE("order zero is the flat Lorentzian cone") {
  auto e = start_expansion(base<Q>(flat(3, "0", "0"), 2));
  auto am = ambient_assemble(e);
  CHECK(am.G(0, 4).constant_term() == 1);
  CHECK(am.G(0, 0).is_zero());
  CHECK(am.G(4, 4).is_zero());
  for (int i = 1; i <= 3; ++i) CHECK(am.G(i, i).constant_term() == 1);
  CHECK(am.A.is_zero());
  CHECK(am.B.constant_term() == -1);
}

TEST_CASE("ambient signature over a round 3-sphere") {
  auto e = solved<Q>(einstein_sphere(3, Q(1)), 2);
  auto am = ambient_assemble(e);
  Eigen::MatrixXd G(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) G(i, j) = am.G(i, j).constant_term().get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  int pos = 0, neg = 0;
  for (int i = 0; i < 5; ++i) (es.eigenvalues()(i) > 0 ? pos : neg)++;
  CHECK(pos == 4);
  CHECK(neg == 1);
}

TEST_CASE("closed-form families solve the ambient equations") {
  const int K = 4;
  auto s3 = base<Q>(einstein_sphere(3, Q(1)), K);
  auto ein = einstein_closed_form(s3, Q(1), K);
  {
    AmbientExpansion<Q> e = start_expansion(s3);
    e.K = K;
    e.g_coeffs = ein.g;
    e.phi_coeffs = ein.phi;
    CHECK(residual_of(ambient_assemble(e), K) == 0);

    // Keep only the linear term of phi_u.  Every equation solved at order 1
    // still holds at u^0; F fails at u^1, and the inf-inf component (the
    // order-2 equation for phi'') already fails at u^0.
    for (int k = 2; k <= K; ++k) e.phi_coeffs[k] = Jet<Q>::zero(e.spec());
    auto r = ambient_residual(ambient_assemble(e), AmbientConvention{});
    const int inf = 4;
    for (int I = 0; I <= inf; ++I)
      for (int J = 0; J <= inf; ++J) {
        if (I == inf && J == inf) continue;
        CHECK(r.P(I, J).u_coeff(0).is_zero());
      }
    CHECK(r.F.u_coeff(0).is_zero());
    CHECK(!r.F.u_coeff(1).is_zero());
    CHECK(!r.P(inf, inf).u_coeff(0).is_zero());
  }
  auto fb = base<Q>(flat(3, "x1^3/3 - x2*x3 + x1^2*x3^2/4", "0"), K);
  auto fc = flat_closed_form(fb, K);
  AmbientExpansion<Q> e = start_expansion(fb);
  e.K = K;
  e.g_coeffs = fc.g;
  e.phi_coeffs = fc.phi;
  CHECK(residual_of(ambient_assemble(e), K) == 0);
}

TEST_CASE("first and second order coefficients") {
  for (const char* lam : {"0", "1/3"}) {
    auto b = base<double>(perturbed_torus(4, parse_rational(lam)), 2);
    auto e = solve_ambient(b, 2);
    auto w = weighted_invariants(b);
    CHECK(mat_add(e.g_coeffs[1], w.P, -2.0).max_abs() <= 1e-13);
    CHECK((e.phi_coeffs[1] + w.Y).max_abs() <= 1e-13);
    if (std::string(lam) == "0") {
      auto B = weighted_bach(b, w);
      auto want = mat_add(mat_sandwich(w.P, w.lc.ginv, w.P), B, -1.0);  // g''/2 = -B + P^2
      CHECK(mat_add(e.g_coeffs[2], want, -1.0).max_abs() <= 1e-12);
      CHECK((e.phi_coeffs[2] + trace(w.lc.ginv, B).scaled(0.5)).max_abs() <= 1e-12);
    }
  }
  auto gs = solved<Q>(builtin_scenario("gaussian-soliton").mm, 2);
  CHECK(gs.g_coeffs[1].all_zero());
}

TEST_CASE("unit 4-sphere expansion") {
  auto e = solved<Q>(einstein_sphere(4, Q(3, 2)), 4);
  const Q phi[] = {0, 6, -18, 72, -324};  // ln(1 + 6u)
  for (int k = 0; k <= 4; ++k) CHECK(e.phi_coeffs[k].constant_term() == phi[k]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(e.g_coeffs[1](i, j) - e.g_coeffs[0](i, j).scaled(Q(6)) == Jet<Q>::zero(e.spec()));
      for (int k = 2; k <= 4; ++k) CHECK(e.g_coeffs[k](i, j).is_zero());
    }
}

TEST_CASE("flat and soliton closed forms to order 4") {
  auto f = solved<Q>(flat_phi_poly(Q(0)), 4);
  CHECK(closed_form_deviation(f, flat_closed_form(f.base, 4)) == 0);
  auto fl = solved<Q>(flat_phi_poly(Q(2, 5)), 4);
  CHECK(closed_form_deviation(fl, flat_closed_form(fl.base, 4)) == 0);
  auto g = solved<Q>(gaussian_soliton(3, Q(1, 2)), 4);
  CHECK(closed_form_deviation(g, soliton_closed_form(g.base, 4)) == 0);
}

TEST_CASE("solver output has vanishing residual") {
  auto e = solved<double>(perturbed_torus(3, Q(0)), 3);
  auto r = ambient_residual(ambient_assemble(e), e.conv);
  CHECK(max_component(verify_residual(r, 3, 3)) <= 1e-10);
}

TEST_CASE("solver is idempotent and rejects small budgets") {
  auto a = solved<Q>(einstein_sphere(3, Q(1, 2)), 3);
  auto b = solved<Q>(einstein_sphere(3, Q(1, 2)), 3);
  CHECK(closed_form_deviation(a, ClosedForm<Q>{b.g_coeffs, b.phi_coeffs}) == 0);
  auto small = to_jets<Q>(einstein_sphere(3, Q(1)), ambient_spec(3, 3, 5, CoeffMode::Rational));
  CHECK_THROWS_AS(solve_ambient(small, 3), BudgetExhausted);
}

TEST_CASE("calibration picks one shift for every family") {
  auto rec = calibrate_convention(3);
  CHECK(rec.chosen == 2);
  for (const auto& r : rec.rows)
    if (r.dim_shift == 2) CHECK(r.deviation == 0);
}

TEST_CASE("perturbing a solved coefficient is detected") {
  auto e = solved<double>(perturbed_torus(0, Q(0)), 4);
  std::mt19937_64 rng(1);
  for (int m = 1; m <= 4; ++m) CHECK(perturbed_order_residual(e, m, rng) > 1e-3);
}

TEST_CASE("volume coefficients") {
  auto e3 = solved<Q>(einstein_sphere(3, Q(1)), 3);
  auto v3 = volume_series(e3);
  const Q want[] = {1, 3, Q(-3, 2), Q(5, 2)};
  for (int k = 0; k <= 3; ++k) CHECK(v3.v[k] == Jet<Q>::constant(e3.spec(), want[k]));

  auto e4 = solved<Q>(einstein_sphere(4, Q(3, 2)), 4);
  auto v4 = volume_series(e4);
  CHECK(v4.v[1].constant_term() == 6);
  for (int k = 2; k <= 4; ++k) CHECK(v4.v[k].is_zero());

  auto g = solved<Q>(gaussian_soliton(3, Q(1, 2)), 4);
  auto vg = volume_series(g);
  Jet<Q> pw = Jet<Q>::constant(g.spec(), Q(1));
  Q fact = 1;
  for (int k = 1; k <= 4; ++k) {
    pw = pw * vg.v[1];
    fact *= k;
    CHECK(vg.v[k] == pw.scaled(1 / fact));
  }

  auto f = solved<Q>(flat(3, "0", "0"), 3);
  auto rf = vk_formula_check(f, volume_series(f));
  CHECK(rf.r1.is_zero());
  CHECK(rf.r2.is_zero());
  CHECK(rf.r3.is_zero());

  auto t = solved<double>(perturbed_torus(1, Q(0)), 3);
  auto rt = vk_formula_check(t, volume_series(t));
  CHECK(rt.r1.max_abs() <= 1e-8);
  CHECK(rt.r2.max_abs() <= 1e-8);
  CHECK(rt.r3.max_abs() <= 1e-6);
}

TEST_CASE("L tensors") {
  auto f = solved<Q>(flat(3, "0", "0"), 2);
  auto vf = volume_series(f);
  CHECK(l_tensor(f, vf, 0).all_zero());
  auto L1 = l_tensor(f, vf, 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(L1(i, j).constant_term() == (i == j ? 1 : 0));

  // Soliton: L_k = (v1)^{k-1}/(k-1)! g^{-1} with v1 = -(n lam - c)/2.
  auto s = solved<Q>(sphere_soliton(2), 4);
  auto vs = volume_series(s);
  auto ginv = inverse(s.base.g);
  Jet<Q> pw = Jet<Q>::constant(s.spec(), Q(1));
  Q fact = 1;
  for (int k = 1; k <= 4; ++k) {
    if (k > 1) {
      pw = pw * vs.v[1];
      fact *= k - 1;
    }
    auto L = l_tensor(s, vs, k);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(L(i, j) - (pw * ginv(i, j)).scaled(1 / fact) == Jet<Q>::zero(s.spec()));
  }
}

TEST_CASE("obstruction tensors") {
  for (auto mm : {flat(3, "x1^2*x2/2 - x3^3/3", "0"), gaussian_soliton(3, Q(1, 2)), flat_phi_poly(Q(1, 3))}) {
    auto e = solved<Q>(mm, 5);
    auto os = obstruction_set(e, 4);
    for (int k = 1; k <= 4; ++k) CHECK(os.Omega[k].all_zero());
    CHECK(recursion_check(os).max() == 0);
  }
  // Einstein, Ric = 2 mu g: Omega1 = -B = -4 mu^2 g, not zero.
  auto s3 = solved<Q>(einstein_sphere(3, Q(1, 2)), 3);
  auto o3 = obstruction_set(s3);
  CHECK(mat_add(o3.Omega[1], s3.base.g, Q(1)).all_zero());

  auto t = solved<double>(perturbed_torus(0, Q(0)), 3);
  auto os = obstruction_set(t);
  auto B = weighted_bach(t.base, weighted_invariants(t.base));
  double d = 0;
  for (size_t i = 0; i < B.c.size(); ++i) d = std::max(d, (os.Omega[1].c[i].restricted(0, 0) + B.c[i].restricted(0, 0)).max_abs());
  CHECK(d <= 1e-8);
  CHECK(recursion_check(os).max() <= 1e-8);
}

TEST_CASE("ambient curvature of model spaces") {
  auto f = solved<Q>(flat_phi_poly(Q(0)), 4);
  auto rm = ambient_riemann(ambient_assemble(f));
  // Only low u-orders are determined by a K = 4 expansion.
  double worst = 0;
  for (const auto& c : rm.c) worst = std::max(worst, c.max_abs_below_u(2));
  CHECK(worst == 0);

  auto s = solved<Q>(gaussian_soliton(3, Q(1, 2)), 3);
  auto rs = ambient_riemann(ambient_assemble(s));
  const int inf = 4;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) CHECK(rs(inf, i, j, inf).is_zero());

  auto t = solved<double>(perturbed_torus(2, Q(0)), 3);
  auto rt = ambient_riemann(ambient_assemble(t));
  double r0 = 0;
  for (int I = 0; I < 5; ++I)
    for (int J = 0; J < 5; ++J)
      for (int K = 0; K < 5; ++K) r0 = std::max(r0, rt(I, J, K, 0).max_abs());
  CHECK(r0 <= 1e-12);
}
