#include "amb/suites.hpp"

#include <cmath>

#include "amb/checks.hpp"
#include "amb/flow.hpp"
#include "amb/functionals.hpp"
#include "amb/gjms.hpp"
#include "amb/obstruction.hpp"
#include "amb/volume.hpp"

namespace amb {

using nlohmann::json;

json Check::to_json() const {
  return json{{"name", name}, {"value", value}, {"tolerance", tolerance},
              {"relation", at_most ? "<=" : ">="}, {"pass", pass()}};
}

bool SuiteResult::pass() const {
  for (const auto& c : checks)
    if (!c.pass()) return false;
  return true;
}

json SuiteResult::to_json() const {
  json j{{"suite", suite}, {"skipped", skipped}, {"pass", pass()}, {"data", data}};
  if (!note.empty()) j["note"] = note;
  json cs = json::array();
  for (const auto& c : checks) cs.push_back(c.to_json());
  j["checks"] = cs;
  return j;
}

std::vector<std::string> suite_names() { return {"solve", "volume", "obstruction", "gjms", "flow", "w-flow"}; }

std::vector<int> default_quad_grid(const MetricMeasure& mm) {
  switch (mm.chart.topology) {
    case Topology::Torus:
      return std::vector<int>(mm.n(), 4);
    case Topology::Sphere:
      return {8, 16};
    case Topology::Plane:
      break;
  }
  return {};
}

namespace {

json scalar_json(const Q& q) { return q.get_str(); }
json scalar_json(double d) { return d; }

// Terms as [e_1, ..., e_n, e_u, coefficient].
template <class S>
json jet_json(const Jet<S>& j) {
  json out = json::array();
  const int nv = j.spec().n_vars;
  for (const auto& t : j.terms()) {
    json row = json::array();
    for (int v = 0; v <= nv; ++v) row.push_back(mono_exp(t.first.key, v));
    row.push_back(scalar_json(t.second));
    out.push_back(row);
  }
  return out;
}

template <class S>
json mat_json(const Mat<S>& m) {
  json out = json::array();
  for (int i = 0; i < m.dim; ++i)
    for (int j = i; j < m.dim; ++j) out.push_back(json{{"i", i + 1}, {"j", j + 1}, {"series", jet_json(m(i, j))}});
  return out;
}

template <class S>
json mat_at_base(const Mat<S>& m) {
  json out = json::array();
  for (int i = 0; i < m.dim; ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim; ++j) row.push_back(scalar_json(m(i, j).constant_term()));
    out.push_back(row);
  }
  return out;
}

bool rational(const Scenario& s) { return s.backend == CoeffMode::Rational; }
double tol(const Scenario& s, double float_tol) { return rational(s) ? 0.0 : float_tol; }

template <class S>
MetricJets<S> base_jets(const Scenario& s) {
  auto spec = ambient_spec(s.mm.n(), s.K, s.spatial_degree(), Scalar<S>::mode);
  return to_jets<S>(s.mm, spec);
}

json calibration_json(const CalibrationRecord& rec) {
  json rows = json::array();
  for (const auto& r : rec.rows) rows.push_back(json{{"family", r.family}, {"dim_shift", r.dim_shift}, {"deviation", r.deviation}});
  return json{{"rows", rows}, {"chosen_dim_shift", rec.chosen}};
}

template <class S>
SuiteResult solve_suite(const Scenario& s) {
  SuiteResult r;
  r.suite = "solve";
  auto rec = calibrate_convention(3);
  if (rec.chosen < 0) throw std::runtime_error("convention calibration is ambiguous");
  AmbientConvention conv{rec.chosen};
  auto e = solve_ambient(base_jets<S>(s), s.K, conv);
  auto res = ambient_residual(ambient_assemble(e), conv);
  auto comps = verify_residual(res, e.n(), e.K);
  double scale = 1;
  for (const auto& m : e.g_coeffs) scale = std::max(scale, m.max_abs());
  json jc = json::array();
  for (const auto& c : comps)
    jc.push_back(json{{"component", c.name}, {"verified_through", c.verified_through}, {"max_abs", c.max_abs}});
  json g = json::array(), phi = json::array();
  for (int k = 0; k <= e.K; ++k) {
    g.push_back(mat_json(e.g_coeffs[k]));
    phi.push_back(jet_json(e.phi_coeffs[k]));
  }
  r.data = json{{"convention", calibration_json(rec)}, {"order", e.K}, {"g_coeffs", g}, {"phi_coeffs", phi},
                {"residual", jc}, {"coefficient_scale", scale}};
  r.checks.push_back({"ambient residual below u^K", max_component(comps), tol(s, 1e-10 * scale)});
  return r;
}

template <class S>
SuiteResult volume_suite(const Scenario& s) {
  SuiteResult r;
  r.suite = "volume";
  auto e = solve_ambient(base_jets<S>(s), s.K);
  auto vs = volume_series(e);
  json v = json::array(), p = json::array(), vser = json::array();
  for (size_t k = 0; k < vs.v.size(); ++k) {
    v.push_back(scalar_json(vs.v[k].constant_term()));
    p.push_back(scalar_json(vs.p[k].constant_term()));
    vser.push_back(jet_json(vs.v[k]));
  }
  r.data = json{{"v_at_base", v}, {"p_at_base", p}, {"v_series", vser}};
  auto f = vk_formula_check(e, vs);
  r.checks.push_back({"v1 = R_phi/2", f.r1.max_abs(), tol(s, 1e-8)});
  if (vs.v.size() > 2) r.checks.push_back({"v2 formula", f.r2.max_abs(), tol(s, 1e-8)});
  if (f.has_r3) r.checks.push_back({"v3 formula", f.r3.max_abs(), tol(s, 1e-6)});
  auto w = weighted_invariants(e.base);
  if (w.P.max_abs() <= tol(s, 1e-12)) {
    double dev = 0;
    Jet<S> pw = Jet<S>::constant(e.spec(), S(1));
    S fact = 1;
    for (size_t k = 1; k < vs.v.size(); ++k) {
      pw = pw * vs.v[1];
      fact *= Scalar<S>::from_int(static_cast<long>(k));
      dev = std::max(dev, (vs.v[k] - pw.scaled(S(1) / fact)).max_abs());
    }
    r.checks.push_back({"soliton power law v_k = v1^k/k!", dev, tol(s, 1e-10)});
  }
  return r;
}

template <class S>
SuiteResult obstruction_suite(const Scenario& s) {
  SuiteResult r;
  r.suite = "obstruction";
  if (s.K < 3) {
    r.skipped = true;
    r.note = "needs order >= 3";
    return r;
  }
  auto e = solve_ambient(base_jets<S>(s), s.K);
  auto os = obstruction_set(e);
  json om = json::array();
  for (size_t k = 1; k < os.Omega.size(); ++k) om.push_back(mat_at_base(os.Omega[k]));
  auto rc = recursion_check(os);
  r.data = json{{"omega_at_base", om}, {"gamma_inf_inf", os.max_gamma_inf_inf}};
  r.checks.push_back({"recursion identities", rc.max(), tol(s, 1e-8)});
  r.checks.push_back({"Gamma^M_inf,inf", os.max_gamma_inf_inf, tol(s, 1e-10)});
  if (Scalar<S>::is_zero(e.lambda())) {
    auto w = weighted_invariants(e.base);
    Mat<S> B = weighted_bach(e.base, w);
    double d = 0;
    for (size_t i = 0; i < B.c.size(); ++i) d = std::max(d, (os.Omega[1].c[i].restricted(0, 0) + B.c[i].restricted(0, 0)).max_abs());
    r.checks.push_back({"Omega1 + B_phi at base", d, tol(s, 1e-8)});
    auto t = third_order_trace_check(e);
    r.data["third_order_trace"] = json{{"lhs", scalar_json(t.lhs.constant_term())},
                                       {"four_tr_P3", scalar_json(t.displayed_rhs.constant_term())},
                                       {"minus_four_P_dot_B", scalar_json(t.derived_rhs.constant_term())}};
    r.checks.push_back({"third-order trace = -4<P,B>", t.derived_residual().max_abs(), tol(s, 1e-8)});
  }
  return r;
}

SuiteResult gjms_suite(const Scenario& s, const SuiteOptions& opt) {
  SuiteResult r;
  r.suite = "gjms";
  if (s.mm.chart.topology != Topology::Torus || sgn(s.mm.lambda) != 0) {
    r.skipped = true;
    r.note = "needs a torus scenario with lambda = 0";
    return r;
  }
  std::vector<int> grid = s.grid.empty() ? std::vector<int>(s.mm.n(), 16) : s.grid;
  GridOperator op(s.mm, grid);
  json per_k = json::array();
  for (int k = 1; k <= 3; ++k) {
    double worst = 0, control = 0;
    for (int t = 0; t < opt.gjms_pairs; ++t) {
      auto f = random_trig(op.rule(), s.seed * 1000 + 2 * t + 1);
      auto h = random_trig(op.rule(), s.seed * 1000 + 2 * t + 2);
      worst = std::max(worst, gjms_selfadjoint_residual(op, k, f, h).relative());
      auto fc = random_trig(op.rule(), s.seed * 1000 + 2 * t + 1, 8, 1);
      auto hc = random_trig(op.rule(), s.seed * 1000 + 2 * t + 2, 8, 1);
      control = std::max(control, plain_selfadjoint_residual(op, k, fc, hc).relative());
    }
    per_k.push_back(json{{"k", k}, {"relative_residual", worst}, {"unweighted_control", control}});
    r.checks.push_back({"self-adjoint k=" + std::to_string(k), worst, 1e-8});
    if (!is_constant(s.mm.phi)) r.checks.push_back({"unweighted control k=" + std::to_string(k), control, 1e-6, false});
  }
  double r2 = leading_symbol_ratio(op, 2, 2), r4 = leading_symbol_ratio(op, 2, 4);
  r.data = json{{"grid", grid}, {"pairs", opt.gjms_pairs}, {"per_k", per_k},
                {"lower_order_ratio", json{{"m2", r2}, {"m4", r4}}}};
  if (r2 > 0) r.checks.push_back({"lower-order part decays with frequency (k=2)", r4 / r2, 0.5});
  return r;
}

QuadRule quad_rule(const Scenario& s, const SuiteOptions& opt) {
  auto g = opt.quad_grid.empty() ? default_quad_grid(s.mm) : opt.quad_grid;
  return rule_for(s.mm, g);
}

bool compact_quadrature(const Scenario& s) {
  return s.mm.chart.topology == Topology::Torus || (s.mm.chart.topology == Topology::Sphere && s.mm.n() == 2);
}

template <class S>
SuiteResult flow_suite(const Scenario& s, const SuiteOptions& opt) {
  SuiteResult r;
  r.suite = "flow";
  if (opt.einstein_table > 0) {
    json rows = json::array();
    bool all = true;
    for (int n = 3; n <= opt.einstein_table; ++n)
      for (const auto& row : einstein_sign_table(n, opt.einstein_mu, 6)) {
        rows.push_back(json{{"n", n}, {"k", row.k}, {"v_k", row.v_k.get_str()}, {"rate", row.rate.get_str()},
                            {"sign_product", row.sign_product}, {"predicted", row.predicted}, {"agrees", row.agrees()}});
        all = all && row.agrees();
      }
    r.data["einstein_table"] = rows;
    r.checks.push_back({"Einstein sign table mismatches", all ? 0.0 : 1.0, 0});
  }
  if (sgn(s.mm.lambda) != 0) {
    if (opt.einstein_table == 0) {
      r.skipped = true;
      r.note = "the F-flow suite needs lambda = 0";
    }
    return r;
  }
  auto e = solve_ambient(base_jets<S>(s), s.K);
  auto vs = volume_series(e);
  auto ff = f_flow_residual(e);
  auto pk = pk_evolution_check(e, vs);
  r.checks.push_back({"F-flow metric residual", ff.metric.max_abs(), tol(s, 1e-8)});
  r.checks.push_back({"F-flow density residual", ff.density.max_abs(), tol(s, 1e-8)});
  r.checks.push_back({"F-flow measure residual", ff.measure.max_abs(), tol(s, 1e-8)});
  json pres = json::array();
  for (const auto& x : pk.residual) pres.push_back(x.max_abs());
  r.data["pk_evolution"] = pres;
  r.checks.push_back({"p_k evolution", pk.max_abs(), tol(s, 1e-8)});
  std::vector<double> p;
  for (const auto& x : vs.p) p.push_back(Scalar<S>::to_double(x.constant_term()));
  auto cone = cone_membership(p);
  json newton = json::array(), gamma = json::array(), shifted = json::array();
  for (size_t k = 1; k + 1 < p.size(); ++k) {
    newton.push_back(cone.newton(static_cast<int>(k)));
    shifted.push_back(cone.shifted_monotone(static_cast<int>(k)));
  }
  for (size_t k = 1; k < p.size(); ++k) gamma.push_back(cone.in_gamma_plus(static_cast<int>(k)));
  r.data["cones"] = json{{"p", p}, {"gamma_plus", gamma}, {"lambda_minus", cone.in_lambda_minus()},
                         {"lambda_minus_strict", cone.lambda_minus_strict()}, {"newton", newton},
                         {"shifted_monotone", shifted}};
  if (cone.in_lambda_minus()) {
    bool ok = true;
    for (size_t k = 1; k + 1 < p.size(); ++k) ok = ok && cone.shifted_monotone(static_cast<int>(k));
    r.checks.push_back({"Lambda^- implies (-1)^(k+1) dp_k >= 0 (violations)", ok ? 0.0 : 1.0, 0});
  }
  if (compact_quadrature(s)) {
    auto q = quad_rule(s, opt);
    auto gs = grid_series(s.mm, 2, q);
    auto m = monotonicity_f1(gs);
    r.data["F1_rate"] = json{{"via_pk", m.via_pk}, {"via_P2", m.via_curvature}, {"nodes", q.size()}};
    r.checks.push_back({"dF1 two routes", m.gap(), 1e-8 * std::max(1.0, std::abs(m.via_curvature))});
  }
  return r;
}

template <class S>
SuiteResult wflow_suite(const Scenario& s, const SuiteOptions& opt) {
  SuiteResult r;
  r.suite = "w-flow";
  if (sgn(s.mm.lambda) <= 0) {
    r.skipped = true;
    r.note = "the W-flow suite needs lambda > 0";
    return r;
  }
  auto b = base_jets<S>(s);
  auto e = solve_ambient(b, s.K);
  auto wr = w_flow_residual(e);
  r.checks.push_back({"W-flow residual", wr.max_abs(), tol(s, 1e-8)});
  for (const char* c : {"1/2", "2"}) {
    double dev = rescaling_deviation(b, s.K, Scalar<S>::from_q(parse_rational(c)));
    r.checks.push_back({std::string("rescaling law c=") + c, dev, tol(s, 1e-10)});
  }
  auto w = weighted_invariants(b);
  const double tau = tau_of(s.mm.lambda.get_d());
  if (w.P.max_abs() <= tol(s, 1e-12)) {
    auto sc = soliton_w_constancy(s.mm, std::min(s.K, 5), {Q(0), Q(1, 4), Q(1, 2), Q(3, 4)});
    json rows = json::array();
    for (size_t i = 0; i < sc.t.size(); ++i) {
      json row = json::array();
      for (const auto& x : sc.scaled[i]) row.push_back(x.get_str());
      rows.push_back(json{{"t", sc.t[i].get_str()}, {"tau_k_v_k", row}});
    }
    r.data["soliton_constancy"] = rows;
    r.checks.push_back({"tau^k v_k constant along shrinker", sc.max_deviation, 1e-10});
    r.checks.push_back({"tau^k v_k = (tau v1)^k/k!", sc.pattern_deviation, 1e-10});
  } else if (compact_quadrature(s)) {
    auto q = quad_rule(s, opt);
    auto gs = grid_series(s.mm, 2, q);
    auto d = w1_derivative(gs, tau);
    r.data["W1_rate"] = json{{"via_pk", d.via_pk}, {"via_P2", d.via_curvature}, {"nodes", q.size()}};
    r.checks.push_back({"dW1 two routes", d.gap(), 1e-6 * std::max(1.0, std::abs(d.via_curvature))});
    r.checks.push_back({"dW1 > 0", d.via_pk, 0, false});
  }
  if (compact_quadrature(s)) {
    auto q = quad_rule(s, opt);
    const int kmax = std::min(s.K, 3);
    auto g0 = grid_series(s.mm, kmax, q);
    json scl = json::array();
    double worst = 0;
    for (const char* c : {"1/2", "2", "10"}) {
      Q cq = parse_rational(c);
      auto g1 = grid_series(rescaled(s.mm, cq), kmax, q);
      for (int k = 1; k <= kmax; ++k) {
        double a = W_functional(g0, k, tau), bb = W_functional(g1, k, tau * cq.get_d());
        double rel = std::abs(a - bb) / std::max(1.0, std::abs(a));
        worst = std::max(worst, rel);
        scl.push_back(json{{"c", c}, {"k", k}, {"W", a}, {"W_scaled", bb}});
      }
    }
    r.data["W_scale"] = scl;
    r.checks.push_back({"W_k(cg, phi, c tau) = W_k(g, phi, tau)", worst, 1e-10});
  }
  return r;
}

template <class S>
SuiteResult dispatch(const std::string& name, const Scenario& s, const SuiteOptions& opt) {
  if (name == "solve") return solve_suite<S>(s);
  if (name == "volume") return volume_suite<S>(s);
  if (name == "obstruction") return obstruction_suite<S>(s);
  if (name == "gjms") return gjms_suite(s, opt);
  if (name == "flow") return flow_suite<S>(s, opt);
  if (name == "w-flow") return wflow_suite<S>(s, opt);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace

SuiteResult run_suite(const std::string& name, const Scenario& s, const SuiteOptions& opt) {
  if (s.backend == CoeffMode::Rational) return dispatch<Q>(name, s, opt);
  return dispatch<double>(name, s, opt);
}

}  // namespace amb
