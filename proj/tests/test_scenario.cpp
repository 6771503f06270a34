#include <doctest.h>

#include <random>

#include "amb/geometry.hpp"
#include "amb/suites.hpp"
#include "helpers.hpp"

using namespace amb;

TEST_CASE("builtin scenarios are deterministic") {
  auto body = [](const std::string& ref) {
    auto j = builtin_scenario(ref).to_json();
    j.erase("name");
    return j.dump();
  };
  CHECK(body("perturbed-torus(seed=0)") == body("perturbed-torus(0)"));
  CHECK(body("perturbed-torus(0)") == body("perturbed-torus(0)"));
  CHECK(body("perturbed-torus(0)") != body("perturbed-torus(1)"));
  CHECK(body("einstein-sphere(mu=3/2, n=4)") == body("einstein-sphere(4,3/2)"));
  CHECK_THROWS_AS(builtin_scenario("einstein-sphere(k=4)"), ParseError);
  CHECK(random_trig_text(test::chart(3), 4) == random_trig_text(test::chart(3), 4));
}

TEST_CASE("Gaussian soliton has vanishing P at random points") {
  auto s = builtin_scenario("gaussian-soliton(lambda=1/2)");
  auto sp = ambient_spec(s.mm.n(), 1, 3, CoeffMode::Float);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> x{d(rng), d(rng), d(rng)};
    auto w = weighted_invariants(to_jets_at(s.mm, sp, x));
    CHECK(w.P.max_abs() <= 1e-14);
  }
}

TEST_CASE("einstein-sphere(4, 3/2) has scalar curvature 12") {
  auto s = builtin_scenario("einstein-sphere(4,3/2)");
  auto w = weighted_invariants(to_jets<Q>(s.mm, ambient_spec(4, 1, 2, CoeffMode::Rational)));
  CHECK(w.R.constant_term() == 12);
}

TEST_CASE("scenario JSON round trip and validation") {
  nlohmann::json j = {{"name", "warped"},
                      {"coords", {"a", "b"}},
                      {"topology", "torus"},
                      {"metric_upper", {"1 + sin(a)/10", "0", "1"}},
                      {"phi", "cos(b)/5"},
                      {"lambda", "0"},
                      {"order", 3},
                      {"backend", "float"}};
  auto s = scenario_from_json(j);
  CHECK(s.K == 3);
  CHECK(s.backend == CoeffMode::Float);
  auto again = scenario_from_json(s.to_json());
  CHECK(again.to_json() == s.to_json());

  auto bad = j;
  bad["phi"] = "cos(c)";
  CHECK_THROWS_AS(scenario_from_json(bad), ParseError);
  bad = j;
  bad["metric_upper"] = {"1", "2", "1"};
  CHECK_THROWS_AS(to_jets<Q>(scenario_from_json(bad).mm, ambient_spec(2, 1, 2, CoeffMode::Rational)), SingularInput);
  bad = j;
  bad["grid"] = {8, 8, 8};
  CHECK_THROWS_AS(scenario_from_json(bad), ParseError);
}

TEST_CASE("suite results report raw numbers") {
  auto s = builtin_scenario("einstein-n3");
  s.K = 3;
  auto r = run_suite("volume", s);
  CHECK(r.pass());
  auto v = r.data["v_at_base"];
  CHECK(v == nlohmann::json({"1", "3", "-3/2", "5/2"}));
  for (const auto& c : r.checks) CHECK(c.to_json().contains("value"));
  CHECK(run_suite("gjms", s).skipped);
  CHECK_THROWS(run_suite("nonsense", s));
}
