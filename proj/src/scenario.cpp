#include "amb/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace amb {

std::string topology_name(Topology t) {
  switch (t) {
    case Topology::Plane:
      return "plane";
    case Topology::Torus:
      return "torus";
    case Topology::Sphere:
      return "sphere";
  }
  return "?";
}

Topology parse_topology(const std::string& s) {
  if (s == "plane") return Topology::Plane;
  if (s == "torus") return Topology::Torus;
  if (s == "sphere") return Topology::Sphere;
  throw ParseError("unknown topology '" + s + "'", 0);
}

static Chart default_chart(int n, Topology t) {
  Chart c;
  c.n = n;
  c.topology = t;
  for (int i = 0; i < n; ++i) c.names.push_back("x" + std::to_string(i + 1));
  c.base.assign(n, Q(0));
  return c;
}

MetricMeasure make_metric_measure(const Chart& chart, const std::vector<std::string>& g_entries,
                                  const std::string& phi, const std::string& lambda) {
  const int n = chart.n;
  if (n < 1 || n > kMaxJetVars) throw ParseError("chart dimension out of range", 0);
  if (static_cast<int>(chart.names.size()) != n || static_cast<int>(chart.base.size()) != n)
    throw ParseError("chart names/base do not match its dimension", 0);
  MetricMeasure mm;
  mm.chart = chart;
  mm.g.assign(n * n, nullptr);
  const size_t full = static_cast<size_t>(n) * n, tri = static_cast<size_t>(n) * (n + 1) / 2;
  if (g_entries.size() == full) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        ExprPtr a = parse_expr(g_entries[i * n + j], chart.names);
        ExprPtr b = parse_expr(g_entries[j * n + i], chart.names);
        if (to_string(a, chart.names) != to_string(b, chart.names))
          throw ParseError("metric entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                               ") and its transpose differ",
                           0);
        mm.g[i * n + j] = mm.g[j * n + i] = a;
      }
  } else if (g_entries.size() == tri) {
    size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) mm.g[i * n + j] = mm.g[j * n + i] = parse_expr(g_entries[k++], chart.names);
  } else {
    throw ParseError("metric needs n*n or n(n+1)/2 entries", 0);
  }
  mm.phi = parse_expr(phi, chart.names);
  mm.lambda = parse_rational(lambda);
  return mm;
}

JetSpec ambient_spec(int n, int K, int D, CoeffMode mode) {
  JetSpec s;
  s.n_vars = n;
  s.spatial_degree = D;
  s.u_order = K;
  s.mode = mode;
  s.u_weight = 2;
  s.validate();
  return s;
}

bool positive_definite(const std::vector<double>& a, int n) {
  // Cholesky without pivoting succeeds iff all leading minors are positive.
  std::vector<double> l(a);
  for (int j = 0; j < n; ++j) {
    double d = l[j * n + j];
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0)) return false;
    d = std::sqrt(d);
    l[j * n + j] = d;
    for (int i = j + 1; i < n; ++i) {
      double s = l[i * n + j];
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / d;
    }
  }
  return true;
}

MetricJets<double> to_jets_at(const MetricMeasure& mm, const JetSpec& spec, const std::vector<double>& x) {
  return to_jets<double>(mm, spec, x);
}

// ---------------------------------------------------------------- builtins

static std::string q_str(const Q& q) { return "(" + q.get_str() + ")"; }

static std::vector<std::string> diag_entries(const std::vector<std::string>& d) {
  const int n = static_cast<int>(d.size());
  std::vector<std::string> e;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) e.push_back(i == j ? d[i] : "0");
  return e;
}

MetricMeasure flat_torus(int n, const std::string& phi, const Q& lambda) {
  Chart c = default_chart(n, Topology::Torus);
  std::vector<std::string> d(n, "1");
  return make_metric_measure(c, diag_entries(d), phi, lambda.get_str());
}

MetricMeasure flat_phi_poly(const Q& lambda) {
  Chart c = default_chart(3, Topology::Plane);
  std::vector<std::string> d(3, "1");
  return make_metric_measure(c, diag_entries(d), "x1^2/2 + x1*x2/3 - x3^3/6 + x2*x3^2/4 + x1^4/12",
                             lambda.get_str());
}

MetricMeasure gaussian_soliton(int n, const Q& lambda) {
  Chart c = default_chart(n, Topology::Plane);
  std::vector<std::string> d(n, "1");
  std::string phi = q_str(lambda / 2) + "*(";
  for (int i = 0; i < n; ++i) phi += (i ? " + " : "") + c.names[i] + "^2";
  phi += ")";
  return make_metric_measure(c, diag_entries(d), phi, lambda.get_str());
}

// Round metric r2 * (dx1^2 + cos^2 x1 (dx2^2 + cos^2 x2 (...))) on coordinates
// names[off..off+m).
static void round_block(std::vector<std::string>& d, const std::vector<std::string>& names, int off, int m,
                        const Q& r2) {
  std::string prefix = q_str(r2);
  for (int k = 0; k < m; ++k) {
    d[off + k] = prefix;
    prefix += "*cos(" + names[off + k] + ")^2";
  }
}

MetricMeasure einstein_sphere(int n, const Q& mu) {
  if (n < 2) throw std::invalid_argument("einstein_sphere: n >= 2");
  if (sgn(mu) <= 0) throw std::invalid_argument("einstein_sphere: mu > 0");
  Chart c = default_chart(n, Topology::Sphere);
  std::vector<std::string> d(n);
  round_block(d, c.names, 0, n, Q(n - 1) / (2 * mu));  // Ric = (n-1)/r^2 g = 2 mu g
  return make_metric_measure(c, diag_entries(d), "0", "0");
}

// Product of round S^2 and S^3 factors, each with Ric = 2 mu g.
MetricMeasure einstein_product(int n, const Q& mu) {
  if (n < 4) throw std::invalid_argument("einstein_product: n >= 4");
  if (sgn(mu) <= 0) throw std::invalid_argument("einstein_product: mu > 0");
  std::vector<int> dims;
  int rest = n;
  while (rest > 0) {
    if (rest == 4 || rest == 2) {
      dims.push_back(2);
      rest -= 2;
    } else {
      dims.push_back(3);
      rest -= 3;
    }
  }
  Chart c = default_chart(n, Topology::Sphere);
  std::vector<std::string> d(n);
  int off = 0;
  for (int m : dims) {
    round_block(d, c.names, off, m, Q(m - 1) / (2 * mu));
    off += m;
  }
  return make_metric_measure(c, diag_entries(d), "0", "0");
}

MetricMeasure sphere_soliton(int n) {
  Chart c = default_chart(n, Topology::Sphere);
  std::vector<std::string> d(n);
  round_block(d, c.names, 0, n, Q(1));
  return make_metric_measure(c, diag_entries(d), "0", std::to_string(n - 1));
}

MetricMeasure perturbed_torus(uint64_t seed, const Q& lambda) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 12345);
  auto amp = [&]() {
    std::uniform_int_distribution<int> k(1, 10);
    std::uniform_int_distribution<int> s(0, 1);
    int v = k(rng);
    return Q(s(rng) ? v : -v, 100);
  };
  auto freq = [&]() { return std::uniform_int_distribution<int>(1, 2)(rng); };
  Chart c = default_chart(3, Topology::Torus);
  const auto& x = c.names;
  auto trig = [&](const char* fn, int f, const std::string& var) {
    return std::string(fn) + "(" + std::to_string(f) + "*" + var + ")";
  };
  std::vector<std::string> e;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      if (i == j) {
        e.push_back("1 + " + q_str(amp()) + "*" + trig("cos", freq(), x[(i + 1) % 3]) + " + " + q_str(amp()) +
                    "*" + trig("sin", freq(), x[(i + 2) % 3]));
      } else {
        int k = 3 - i - j;
        e.push_back(q_str(amp()) + "*" + trig("sin", freq(), x[k]) + " + " + q_str(amp()) + "*" +
                    trig("cos", freq(), x[i]) + "*" + trig("cos", freq(), x[j]));
      }
    }
  std::string phi = q_str(amp()) + "*sin(" + x[0] + ") + " + q_str(amp()) + "*cos(" + x[1] + " + " + x[2] +
                    ") + " + q_str(amp()) + "*sin(2*" + x[2] + ")*cos(" + x[0] + ")";
  return make_metric_measure(c, e, phi, lambda.get_str());
}

// ---------------------------------------------------------------- scenarios

static std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

static int arg_int(const std::vector<std::string>& a, size_t i, int def) {
  if (i >= a.size()) return def;
  Q q = parse_rational(a[i]);
  if (q.get_den() != 1 || !q.get_num().fits_sint_p()) throw ParseError("expected an integer argument", 0);
  return static_cast<int>(q.get_num().get_si());
}
static Q arg_q(const std::vector<std::string>& a, size_t i, const Q& def) {
  return i >= a.size() ? def : parse_rational(a[i]);
}

std::vector<std::string> builtin_names() {
  return {"flat-phi-poly(lambda=1/3)",  "gaussian-soliton(lambda=1/2)", "einstein-sphere(n=4,mu=3/2)",
          "einstein-product(n=6,mu=1)", "sphere-soliton(n=2)",          "perturbed-torus(seed=0,lambda=0)",
          "einstein-n<k> (= einstein-sphere(k,1))"};
}

// Accepts positional "1/2" or named "mu=1/2" arguments; names must match the
// builtin's parameter list.
static std::vector<std::string> resolve_args(const std::vector<std::string>& raw,
                                             const std::vector<std::string>& params) {
  std::vector<std::string> out(params.size());
  std::vector<bool> set(params.size(), false);
  size_t pos = 0;
  for (const auto& a : raw) {
    auto eq = a.find('=');
    size_t slot = pos;
    std::string value = a;
    if (eq != std::string::npos) {
      auto it = std::find(params.begin(), params.end(), a.substr(0, eq));
      if (it == params.end()) throw ParseError("unknown builtin argument '" + a.substr(0, eq) + "'", 0);
      slot = static_cast<size_t>(it - params.begin());
      value = a.substr(eq + 1);
    } else {
      ++pos;
    }
    if (slot >= params.size()) throw ParseError("too many builtin arguments", 0);
    if (set[slot]) throw ParseError("builtin argument '" + params[slot] + "' given twice", 0);
    out[slot] = value;
    set[slot] = true;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  for (const auto& v : out)
    if (v.empty()) throw ParseError("builtin arguments leave a gap", 0);
  return out;
}

Scenario builtin_scenario(const std::string& spec) {
  std::string name = spec, args;
  auto p = spec.find('(');
  if (p != std::string::npos) {
    if (spec.back() != ')') throw ParseError("unterminated builtin argument list", spec.size());
    name = spec.substr(0, p);
    args = spec.substr(p + 1, spec.size() - p - 2);
  }
  const auto raw = split_args(args);
  std::vector<std::string> a;
  Scenario s;
  s.name = spec;
  if (name == "flat-phi-poly") {
    a = resolve_args(raw, {"lambda"});
    s.mm = flat_phi_poly(arg_q(a, 0, Q(1, 3)));
  } else if (name == "gaussian-soliton") {
    a = resolve_args(raw, {"lambda"});
    s.mm = gaussian_soliton(3, arg_q(a, 0, Q(1, 2)));
  } else if (name == "einstein-sphere") {
    a = resolve_args(raw, {"n", "mu"});
    s.mm = einstein_sphere(arg_int(a, 0, 4), arg_q(a, 1, Q(3, 2)));
  } else if (name.rfind("einstein-n", 0) == 0 && name.size() > 10) {
    a = resolve_args(raw, {"mu"});
    s.mm = einstein_sphere(std::stoi(name.substr(10)), arg_q(a, 0, Q(1)));
  } else if (name == "einstein-product") {
    a = resolve_args(raw, {"n", "mu"});
    s.mm = einstein_product(arg_int(a, 0, 6), arg_q(a, 1, Q(1)));
  } else if (name == "sphere-soliton") {
    a = resolve_args(raw, {"n"});
    s.mm = sphere_soliton(arg_int(a, 0, 2));
  } else if (name == "perturbed-torus") {
    a = resolve_args(raw, {"seed", "lambda"});
    int seed = arg_int(a, 0, 0);
    if (seed < 0) throw ParseError("seed must be non-negative", 0);
    s.seed = static_cast<uint64_t>(seed);
    s.mm = perturbed_torus(s.seed, arg_q(a, 1, Q(0)));
    s.backend = CoeffMode::Float;
  } else {
    throw ParseError("unknown builtin scenario '" + name + "'", 0);
  }
  if (s.mm.chart.topology == Topology::Torus) s.grid.assign(s.mm.n(), 16);
  return s;
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["coords"] = mm.chart.names;
  j["topology"] = topology_name(mm.chart.topology);
  std::vector<std::string> base;
  for (const auto& q : mm.chart.base) base.push_back(q.get_str());
  j["base"] = base;
  std::vector<std::string> g;
  for (int i = 0; i < mm.n(); ++i)
    for (int k = i; k < mm.n(); ++k) g.push_back(to_string(mm.g_at(i, k), mm.chart.names));
  j["metric_upper"] = g;
  j["phi"] = to_string(mm.phi, mm.chart.names);
  j["lambda"] = mm.lambda.get_str();
  j["order"] = K;
  j["spatial_degree"] = spatial_degree();
  j["backend"] = backend == CoeffMode::Rational ? "rational" : "float";
  j["grid"] = grid;
  j["suites"] = suites;
  j["seed"] = seed;
  return j;
}

static std::string expr_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError("expressions must be strings or integers", 0);
}

Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object", 0);
  if (j.contains("builtin")) {
    Scenario s = builtin_scenario(j.at("builtin").get<std::string>());
    if (j.contains("order")) s.K = j.at("order").get<int>();
    if (j.contains("spatial_degree")) s.D = j.at("spatial_degree").get<int>();
    return s;
  }
  Scenario s;
  s.name = j.value("name", "scenario");
  Chart c;
  c.names = j.at("coords").get<std::vector<std::string>>();
  c.n = static_cast<int>(c.names.size());
  c.topology = parse_topology(j.value("topology", "plane"));
  if (j.contains("base")) {
    for (const auto& b : j.at("base")) c.base.push_back(parse_rational(expr_text(b)));
  } else {
    c.base.assign(c.n, Q(0));
  }
  std::vector<std::string> g;
  if (j.contains("metric")) {
    for (const auto& row : j.at("metric")) {
      if (!row.is_array()) throw ParseError("metric must be an array of rows", 0);
      for (const auto& e : row) g.push_back(expr_text(e));
    }
  } else if (j.contains("metric_upper")) {
    for (const auto& e : j.at("metric_upper")) g.push_back(expr_text(e));
  } else {
    throw ParseError("scenario needs 'metric' or 'metric_upper'", 0);
  }
  s.mm = make_metric_measure(c, g, j.contains("phi") ? expr_text(j.at("phi")) : "0",
                             j.contains("lambda") ? expr_text(j.at("lambda")) : "0");
  s.K = j.value("order", 4);
  s.D = j.value("spatial_degree", -1);
  std::string be = j.value("backend", "rational");
  if (be == "rational")
    s.backend = CoeffMode::Rational;
  else if (be == "float")
    s.backend = CoeffMode::Float;
  else
    throw ParseError("backend must be rational or float", 0);
  if (j.contains("grid")) s.grid = j.at("grid").get<std::vector<int>>();
  if (j.contains("suites")) s.suites = j.at("suites").get<std::vector<std::string>>();
  s.seed = j.value("seed", uint64_t{0});
  if (!s.grid.empty() && static_cast<int>(s.grid.size()) != c.n)
    throw ParseError("grid rank does not match chart dimension", 0);
  return s;
}

Scenario load_scenario(const std::string& ref) {
  if (ref.rfind("builtin:", 0) == 0) return builtin_scenario(ref.substr(8));
  std::ifstream in(ref);
  if (!in) throw ParseError("cannot open scenario file '" + ref + "'", 0);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario field error: ") + e.what(), 0);
  }
}

std::string random_trig_text(const Chart& chart, uint64_t seed, int terms, int max_freq) {
  std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ULL + 77);
  std::uniform_int_distribution<int> fq(-max_freq, max_freq), amp(-100, 100);
  std::string out;
  for (int t = 0; t < terms; ++t) {
    std::string arg;
    for (int i = 0; i < chart.n; ++i) {
      int k = fq(rng);
      if (k == 0) continue;
      std::string sign = k < 0 ? (arg.empty() ? "-" : " - ") : (arg.empty() ? "" : " + ");
      arg += sign + (std::abs(k) == 1 ? "" : std::to_string(std::abs(k)) + "*") + chart.names[i];
    }
    if (arg.empty()) arg = "0";
    Q a(amp(rng), 100), b(amp(rng), 100);
    a.canonicalize();
    b.canonicalize();
    out += (out.empty() ? "" : " + ") + q_str(a) + "*cos(" + arg + ") + " + q_str(b) + "*sin(" + arg + ")";
  }
  return out;
}

}  // namespace amb
