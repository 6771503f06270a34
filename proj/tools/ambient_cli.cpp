// Command-line runner: load a scenario, run verification suites, write a report.
//
// Exit status: 0 all requested suites pass, 1 a suite failed, 2 bad input,
// 3 a truncation budget was exhausted.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "amb/checks.hpp"
#include "amb/suites.hpp"

using nlohmann::json;

namespace {

std::vector<int> parse_grid(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    size_t used = 0;
    int v = std::stoi(part, &used);
    if (used != part.size() || v < 2) throw amb::ParseError("bad grid '" + s + "'", 0);
    out.push_back(v);
  }
  if (out.empty()) throw amb::ParseError("empty grid", 0);
  return out;
}

int thread_count() {
  const char* e = std::getenv("AMB_THREADS");
  if (!e) return 1;
  int n = std::atoi(e);
  return n < 1 ? 1 : n;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

std::string to_csv(const std::vector<amb::SuiteResult>& results) {
  std::string out = "suite,check,value,relation,tolerance,pass\n";
  for (const auto& r : results) {
    if (r.skipped) out += csv_field(r.suite) + ",skipped: " + csv_field(r.note) + ",,,,\n";
    for (const auto& c : r.checks)
      out += csv_field(r.suite) + "," + csv_field(c.name) + "," + num(c.value) + "," + (c.at_most ? "<=" : ">=") + "," +
             num(c.tolerance) + "," + (c.pass() ? "PASS" : "FAIL") + "\n";
  }
  for (const auto& r : results) {
    if (!r.data.contains("einstein_table")) continue;
    out += "\nn,k,v_k,rate,sign_product,predicted,agrees\n";
    for (const auto& row : r.data["einstein_table"])
      out += std::to_string(row["n"].get<int>()) + "," + std::to_string(row["k"].get<int>()) + "," +
             row["v_k"].get<std::string>() + "," + row["rate"].get<std::string>() + "," +
             std::to_string(row["sign_product"].get<int>()) + "," + std::to_string(row["predicted"].get<int>()) + "," +
             (row["agrees"].get<bool>() ? "yes" : "no") + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted ambient metric solver and verification runner"};
  app.require_subcommand(1, 1);

  std::string scenario_ref, backend, grid, quad_grid, out_path, format = "json";
  int order = -1, spatial = -1, pairs = 10, table = 0;
  std::string table_mu = "1";
  bool timing = false;

  std::vector<std::string> commands = amb::suite_names();
  commands.push_back("verify-all");
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c, c == "verify-all" ? "run every suite" : "run the " + c + " suite");
    sub->add_option("--scenario", scenario_ref, "builtin:<name> or a scenario JSON file")->required();
    sub->add_option("--order", order, "u-order budget K");
    sub->add_option("--spatial-degree", spatial, "spatial jet degree D (default 2K+2)");
    sub->add_option("--backend", backend, "rational or float")->check(CLI::IsMember({"rational", "float"}));
    sub->add_option("--grid", grid, "spectral grid NxNx...");
    sub->add_option("--quad-grid", quad_grid, "node-solve quadrature grid NxN...");
    sub->add_option("--pairs", pairs, "random function pairs for the self-adjointness check");
    sub->add_option("--einstein-table", table, "flow: also tabulate Einstein signs for n = 3..N");
    sub->add_option("--einstein-mu", table_mu, "flow: Einstein constant for the table");
    sub->add_option("--out", out_path, "report path (default stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timing", timing, "record wall time per suite (reports stop being byte-identical)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  amb::Scenario s;
  amb::SuiteOptions opt;
  try {
    s = amb::load_scenario(scenario_ref);
    if (order >= 0) s.K = order;
    if (spatial >= 0) s.D = spatial;
    if (!backend.empty()) s.backend = backend == "float" ? amb::CoeffMode::Float : amb::CoeffMode::Rational;
    if (!grid.empty()) {
      s.grid = parse_grid(grid);
      if (static_cast<int>(s.grid.size()) != s.mm.n()) throw amb::ParseError("grid rank differs from chart dimension", 0);
    }
    if (!quad_grid.empty()) opt.quad_grid = parse_grid(quad_grid);
    if (s.K < 1) throw amb::ParseError("order must be >= 1", 0);
    opt.gjms_pairs = pairs;
    opt.einstein_table = table;
    opt.einstein_mu = amb::parse_rational(table_mu);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<std::string> names;
  if (command == "verify-all")
    names = s.suites.empty() ? amb::suite_names() : s.suites;
  else
    names = {command};

  std::vector<amb::SuiteResult> results(names.size());
  std::vector<double> seconds(names.size(), 0);
  int status = 0;
  try {
    auto run_one = [&](size_t i) {
      auto t0 = std::chrono::steady_clock::now();
      results[i] = amb::run_suite(names[i], s, opt);
      seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const size_t width = static_cast<size_t>(thread_count());
    for (size_t start = 0; start < names.size(); start += width) {
      std::vector<std::future<void>> batch;
      for (size_t i = start; i < std::min(names.size(), start + width); ++i)
        batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, run_one, i));
      for (auto& f : batch) f.get();
    }
  } catch (const amb::BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const amb::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const amb::SingularInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const amb::DomainError& e) {
    std::cerr << "error: " << e.what() << " (try --backend float)\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }

  bool all = true;
  json suites = json::array();
  for (size_t i = 0; i < results.size(); ++i) {
    json j = results[i].to_json();
    if (timing) j["seconds"] = seconds[i];
    suites.push_back(j);
    all = all && results[i].pass();
  }
  if (!all) status = 1;

  std::string text;
  if (format == "csv") {
    text = to_csv(results);
  } else {
    auto rec = amb::calibrate_convention(3);
    json conv = json::array();
    for (const auto& r : rec.rows) conv.push_back(json{{"family", r.family}, {"dim_shift", r.dim_shift}, {"deviation", r.deviation}});
    json report{{"scenario", s.to_json()},
                {"command", command},
                {"convention", json{{"rows", conv}, {"chosen_dim_shift", rec.chosen}}},
                {"suites", suites},
                {"pass", all}};
    text = report.dump(2) + "\n";
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
    f << text;
  }
  for (const auto& r : results)
    for (const auto& c : r.checks)
      if (!c.pass()) std::cerr << "FAIL " << r.suite << ": " << c.name << " = " << c.value << "\n";
  return status;
}
