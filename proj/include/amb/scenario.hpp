// Charts, metric-measure data given by expressions, the builtin catalog and
// scenario files.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "amb/expr.hpp"
#include "amb/geometry.hpp"

namespace amb {

enum class Topology { Plane, Torus, Sphere };

std::string topology_name(Topology t);
Topology parse_topology(const std::string& s);

struct Chart {
  int n = 0;
  std::vector<std::string> names;
  std::vector<Q> base;
  Topology topology = Topology::Plane;
};

// g is stored row-major n*n; both triangles point at the same expressions.
struct MetricMeasure {
  Chart chart;
  std::vector<ExprPtr> g;
  ExprPtr phi;
  Q lambda = 0;

  int n() const { return chart.n; }
  const ExprPtr& g_at(int i, int j) const { return g[i * chart.n + j]; }
};

// Entries may be given as a full n*n matrix (must be symmetric as text) or the
// n(n+1)/2 upper triangle in row order.
MetricMeasure make_metric_measure(const Chart& chart, const std::vector<std::string>& g_entries,
                                  const std::string& phi, const std::string& lambda);

// Jet spec used for ambient work: spatial degree D, u-order K, ambient weighting.
JetSpec ambient_spec(int n, int K, int D, CoeffMode mode);

// Leading principal minors of a constant symmetric matrix, all > 0.
bool positive_definite(const std::vector<double>& a, int n);

template <class S>
MetricJets<S> to_jets(const MetricMeasure& mm, const JetSpec& spec, const std::vector<S>& base) {
  const int n = mm.n();
  MetricJets<S> out;
  out.g = Mat<S>(spec, n, 2, Symmetry::Symmetric2);
  std::vector<double> c(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet<S> e = field_to_jet(mm.g_at(i, j), spec, base);
      out.g(i, j) = e;
      out.g(j, i) = e;
      c[i * n + j] = c[j * n + i] = Scalar<S>::to_double(e.constant_term());
    }
  if (!positive_definite(c, n)) throw SingularInput("metric is not positive definite at the base point");
  out.phi = field_to_jet(mm.phi, spec, base);
  out.lambda = Scalar<S>::from_q(mm.lambda);
  return out;
}

template <class S>
MetricJets<S> to_jets(const MetricMeasure& mm, const JetSpec& spec) {
  std::vector<S> b;
  for (const auto& q : mm.chart.base) b.push_back(Scalar<S>::from_q(q));
  return to_jets<S>(mm, spec, b);
}

// Same data re-expanded about another point of the chart (float only).
MetricJets<double> to_jets_at(const MetricMeasure& mm, const JetSpec& spec, const std::vector<double>& x);

struct Scenario {
  std::string name;
  MetricMeasure mm;
  int K = 4;
  int D = -1;  // -1: 2K+2
  CoeffMode backend = CoeffMode::Rational;
  std::vector<int> grid;
  std::vector<std::string> suites;
  uint64_t seed = 0;

  int spatial_degree() const { return D < 0 ? 2 * K + 2 : D; }
  nlohmann::json to_json() const;
};

// Builtins, by name with optional arguments, e.g. "einstein-sphere(4,3/2)",
// "perturbed-torus(3)", "gaussian-soliton(1/2)".
Scenario builtin_scenario(const std::string& spec);
std::vector<std::string> builtin_names();

Scenario scenario_from_json(const nlohmann::json& j);
// "builtin:<name>" or a path to a JSON file.
Scenario load_scenario(const std::string& ref);

// Seeded trigonometric polynomial sum a cos(k.x) + b sin(k.x) with integer
// frequencies |k_i| <= max_freq and amplitudes in {-1, -0.99, ..., 1}.
std::string random_trig_text(const Chart& chart, uint64_t seed, int terms = 3, int max_freq = 2);

// Named constructors used by the builtin catalog and the tests.
MetricMeasure flat_phi_poly(const Q& lambda);
MetricMeasure gaussian_soliton(int n, const Q& lambda);
MetricMeasure einstein_sphere(int n, const Q& mu);
MetricMeasure einstein_product(int n, const Q& mu);
MetricMeasure sphere_soliton(int n);
MetricMeasure perturbed_torus(uint64_t seed, const Q& lambda);
MetricMeasure flat_torus(int n, const std::string& phi, const Q& lambda);

}  // namespace amb
