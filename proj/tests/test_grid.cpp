#include <doctest.h>

#include <cmath>
#include <random>

#include "amb/gjms.hpp"
#include "amb/quadrature.hpp"
#include "amb/simd.hpp"
#include "helpers.hpp"

using namespace amb;

TEST_CASE("SIMD kernels match the scalar reference") {
  if (!simd::avx2_available()) {
    MESSAGE("AVX2 not available; only the scalar path is exercised");
    return;
  }
  const auto& ref = simd::kernels(simd::Isa::Scalar);
  const auto& vec = simd::kernels(simd::Isa::Avx2);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(-1, 1);
  for (size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 1000, 4099}) {
    std::vector<double> w(n), a(n), b(n), y1(n), y2(n), o1(n), o2(n);
    for (size_t i = 0; i < n; ++i) {
      w[i] = std::abs(d(rng));
      a[i] = d(rng);
      b[i] = d(rng);
      y1[i] = y2[i] = d(rng);
    }
    double scale = 1;
    for (size_t i = 0; i < n; ++i) scale += std::abs(w[i] * a[i]);
    CHECK(std::abs(ref.weighted_dot(w.data(), a.data(), b.data(), n) - vec.weighted_dot(w.data(), a.data(), b.data(), n)) <=
          1e-14 * scale);
    CHECK(std::abs(ref.weighted_sum(w.data(), a.data(), n) - vec.weighted_sum(w.data(), a.data(), n)) <= 1e-14 * scale);
    ref.axpy(0.3, a.data(), y1.data(), n);
    vec.axpy(0.3, a.data(), y2.data(), n);
    ref.mul(a.data(), b.data(), o1.data(), n);
    vec.mul(a.data(), b.data(), o2.data(), n);
    for (size_t i = 0; i < n; ++i) {
      CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);
      CHECK(o1[i] == o2[i]);
    }
  }
}

TEST_CASE("quadrature rules") {
  std::vector<double> x, w;
  gauss_legendre(6, x, w);
  for (int p = 0; p <= 11; ++p) {
    double s = 0;
    for (int i = 0; i < 6; ++i) s += w[i] * std::pow(x[i], p);
    CHECK(s == doctest::Approx(p % 2 ? 0.0 : 2.0 / (p + 1)).epsilon(1e-14));
  }
  auto t = torus_rule({8, 6});
  std::vector<double> f;
  for (const auto& p : t.nodes) f.push_back(1 + std::cos(3 * p[0]) * std::sin(2 * p[1]));
  CHECK(integrate(t, f) == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-14));

  auto s = sphere_rule(8, 16);
  std::vector<double> area;
  for (const auto& p : s.nodes) area.push_back(std::cos(p[0]));
  CHECK(integrate(s, area) == doctest::Approx(4 * M_PI).epsilon(1e-13));

  auto b = box_rule(2, 40, 6);
  std::vector<double> g;
  for (const auto& p : b.nodes) g.push_back(std::exp(-p[0] * p[0] - p[1] * p[1]));
  CHECK(integrate(b, g) == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("GJMS jet operator") {
  auto flat = to_jets<Q>(flat_torus(1, "0", Q(0)), test::spec(1, 8, 0));
  auto sp = flat.phi.spec();
  auto sinx = field_to_jet(parse_expr("sin(x1)", {"x1"}), sp, std::vector<Q>{Q(0)});
  CHECK((gjms_apply(flat, 1, sinx) + sinx).restricted(6, 0).is_zero());
  CHECK(gjms_apply(flat, 2, Jet<Q>::constant(sp, Q(1))).is_zero());

  auto t = to_jets<double>(perturbed_torus(0, Q(0)), test::spec(3, 8, 0, CoeffMode::Float));
  auto f = field_to_jet(parse_expr(random_trig_text(test::chart(3), 1), {"x1", "x2", "x3"}), t.phi.spec(),
                        std::vector<double>{0, 0, 0});
  auto l4 = gjms_apply(t, 2, f);
  auto l2l2 = gjms_apply(t, 1, gjms_apply(t, 1, f));
  CHECK((l4 - l2l2).max_abs() <= 1e-10);
  CHECK_THROWS(gjms_apply(to_jets<Q>(gaussian_soliton(2, Q(1)), test::spec(2, 4, 0)), 1, sinx.convert<Q>(test::spec(2, 4, 0))));
}

TEST_CASE("grid operator agrees with the jet operator") {
  auto mm = perturbed_torus(3, Q(0));
  GridOperator op(mm, {32, 32, 32});
  const std::string text = random_trig_text(test::chart(3), 5, 3, 1);
  auto e = parse_expr(text, {"x1", "x2", "x3"});
  std::vector<double> f;
  for (const auto& p : op.rule().nodes) f.push_back(eval(e, p));
  auto mj = to_jets<double>(mm, test::spec(3, 6, 0, CoeffMode::Float));
  auto fj = field_to_jet(e, mj.phi.spec(), std::vector<double>{0, 0, 0});
  for (int k = 1; k <= 2; ++k) {
    double jet = gjms_apply(mj, k, fj).constant_term();
    double grid = op.gjms(f, k)[0];  // node 0 is the base point
    // Spectral error; k = 2 differentiates the metric twice more.
    CHECK(std::abs(jet - grid) <= (k == 1 ? 1e-8 : 1e-5) * (1 + std::abs(jet)));
  }
  auto l4 = op.gjms(f, 2), l2l2 = op.gjms(op.gjms(f, 1), 1);
  double d = 0, m = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    d = std::max(d, std::abs(l4[i] - l2l2[i]));
    m = std::max(m, std::abs(l4[i]));
  }
  CHECK(d <= 1e-10 * m);
}

TEST_CASE("grid operator self-adjointness") {
  {
    GridOperator op(flat_torus(2, "0", Q(0)), {16, 16});
    auto f = random_trig(op.rule(), 1), h = random_trig(op.rule(), 2);
    auto ones = std::vector<double>(f.size(), 1.0);
    double z = 0;
    for (double x : op.gjms(ones, 2)) z = std::max(z, std::abs(x));
    CHECK(z <= 1e-12);
    for (int k = 1; k <= 3; ++k) CHECK(gjms_selfadjoint_residual(op, k, f, h).relative() <= 1e-13);
  }
  GridOperator op(flat_torus(3, "sin(x1)", Q(0)), {16, 16, 16});
  for (int k = 1; k <= 3; ++k) {
    auto f = random_trig(op.rule(), 10 + k), h = random_trig(op.rule(), 20 + k);
    CHECK(gjms_selfadjoint_residual(op, k, f, h).relative() <= 1e-8);
    auto fc = random_trig(op.rule(), 10 + k, 8, 1), hc = random_trig(op.rule(), 20 + k, 8, 1);
    CHECK(plain_selfadjoint_residual(op, k, fc, hc).relative() >= 1e-3);
  }
  CHECK(leading_symbol_ratio(op, 2, 4) < leading_symbol_ratio(op, 2, 2));
  CHECK_THROWS(GridOperator(flat_torus(2, "0", Q(1)), {8, 8}));
}
