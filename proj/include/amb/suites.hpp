// Verification suites behind the command-line runner.  Each suite returns its
// checks (value, tolerance, verdict) and the data they were judged on.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "amb/scenario.hpp"

namespace amb {

struct Check {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool at_most = true;  // value <= tolerance; otherwise value >= tolerance
  bool pass() const { return at_most ? value <= tolerance : value >= tolerance; }
  nlohmann::json to_json() const;
};

struct SuiteResult {
  std::string suite;
  bool skipped = false;
  std::string note;
  std::vector<Check> checks;
  nlohmann::json data = nlohmann::json::object();
  bool pass() const;
  nlohmann::json to_json() const;
};

struct SuiteOptions {
  std::vector<int> quad_grid;  // node-solve integrals; empty: small default per topology
  int gjms_pairs = 10;
  int einstein_table = 0;  // flow: also tabulate n = 3..einstein_table
  Q einstein_mu = 1;
};

std::vector<std::string> suite_names();  // solve volume obstruction gjms flow w-flow
SuiteResult run_suite(const std::string& name, const Scenario& s, const SuiteOptions& opt = {});

// Grid used by the node-solve integrals of a scenario.
std::vector<int> default_quad_grid(const MetricMeasure& mm);

}  // namespace amb
