#include "amb/functionals.hpp"

#include <cmath>
#include <numbers>

#include "amb/simd.hpp"
#include "amb/volume.hpp"

namespace amb {

NodeSeries node_series(const MetricMeasure& mm, int K, const std::vector<double>& x, bool with_L,
                       AmbientConvention conv) {
  const int n = mm.n();
  K = std::max(K, 2);  // the u-derivatives in the residual need two orders
  auto spec = ambient_spec(n, K, 2 * K + 2, CoeffMode::Float);
  auto base = to_jets_at(mm, spec, x);
  auto e = solve_ambient(base, K, conv);
  auto vs = volume_series(e);
  NodeSeries ns;
  for (const auto& j : vs.v) ns.v.push_back(j.constant_term());
  auto w = weighted_invariants(base);
  ns.P2 = contract2(w.lc.ginv, w.P, w.P).constant_term();
  Jet<double> det;
  inverse(base.g, &det);
  ns.sqrt_g = std::sqrt(det.constant_term());
  ns.phi = base.phi.constant_term();
  if (with_L) {
    ns.L.push_back(std::vector<double>(n * n, 0.0));
    for (int k = 1; k <= K; ++k) {
      auto L = l_tensor(e, vs, k);
      std::vector<double> m(n * n);
      for (int i = 0; i < n * n; ++i) m[i] = L.c[i].constant_term();
      ns.L.push_back(m);
    }
  }
  return ns;
}

GridSeries grid_series(const MetricMeasure& mm, int K, const QuadRule& q, bool with_L, AmbientConvention conv) {
  GridSeries gs;
  gs.rule = q;
  gs.n = mm.n();
  gs.K = K;
  gs.lambda = mm.lambda.get_d();
  for (size_t i = 0; i < q.size(); ++i) {
    gs.nodes.push_back(node_series(mm, K, q.nodes[i], with_L, conv));
    const auto& ns = gs.nodes.back();
    gs.mu.push_back(q.weights[i] * ns.sqrt_g * std::exp(-ns.phi));
  }
  return gs;
}

double GridSeries::integrate(const std::vector<double>& f) const {
  return simd::active().weighted_sum(mu.data(), f.data(), f.size());
}

double GridSeries::volume() const { return integrate(std::vector<double>(mu.size(), 1.0)); }

std::vector<double> GridSeries::v(int k) const {
  std::vector<double> r;
  for (const auto& ns : nodes) r.push_back(k < 0 ? 0.0 : ns.v.at(k));
  return r;
}

std::vector<double> GridSeries::p(int k) const {
  double f = std::tgamma(k + 1.0);
  auto r = v(k);
  for (auto& x : r) x *= f;
  return r;
}

double tau_of(double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("tau requires lambda > 0");
  return 0.5 / lambda;
}

double gaussian_factor(int n, double tau) { return std::pow(4 * std::numbers::pi * tau, -0.5 * n); }

double F_functional(const GridSeries& gs, int k) { return gs.integrate(gs.v(k)); }

double W_functional(const GridSeries& gs, int k, double tau) {
  return std::pow(tau, k) * gaussian_factor(gs.n, tau) * gs.integrate(gs.v(k));
}

double TwoRoutes::gap() const { return std::abs(via_pk - via_curvature); }

TwoRoutes monotonicity_f1(const GridSeries& gs) {
  if (gs.K < 2) throw std::invalid_argument("monotonicity_f1: K >= 2");
  auto p1 = gs.p(1), p2 = gs.p(2);
  std::vector<double> rate(p1.size()), P2(p1.size());
  for (size_t i = 0; i < p1.size(); ++i) {
    rate[i] = -p2[i] + p1[i] * p1[i];
    P2[i] = gs.nodes[i].P2;
  }
  return {gs.integrate(rate), gs.integrate(P2)};
}

double w_derivative(const GridSeries& gs, int k, double tau) {
  if (gs.K < k + 1) throw std::invalid_argument("w_derivative: K >= k+1");
  auto p1 = gs.p(1), pk = gs.p(k), pk1 = gs.p(k + 1);
  std::vector<double> rate(p1.size());
  for (size_t i = 0; i < p1.size(); ++i) rate[i] = -pk1[i] + p1[i] * pk[i];
  return std::pow(tau, k) / std::tgamma(k + 1.0) * gaussian_factor(gs.n, tau) * gs.integrate(rate);
}

TwoRoutes w1_derivative(const GridSeries& gs, double tau) {
  std::vector<double> P2;
  for (const auto& ns : gs.nodes) P2.push_back(ns.P2);
  return {w_derivative(gs, 1, tau), tau * gaussian_factor(gs.n, tau) * gs.integrate(P2)};
}

std::vector<double> critical_residual(const GridSeries& gs, int k) {
  auto vk = gs.v(k), vk1 = gs.v(k - 1);
  std::vector<double> r(vk.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = vk[i] - gs.lambda * vk1[i];
  double a = gs.integrate(r) / gs.volume();
  for (auto& x : r) x -= a;
  return r;
}

MetricMeasure with_phi(const MetricMeasure& mm, const ExprPtr& phi) {
  MetricMeasure out = mm;
  out.phi = phi;
  return out;
}

MetricMeasure shifted_phi(const MetricMeasure& mm, const ExprPtr& omega, const Q& t) {
  return with_phi(mm, make_add(mm.phi, make_mul(make_const(t), omega)));
}

MetricMeasure rescaled(const MetricMeasure& mm, const Q& c) {
  if (sgn(c) <= 0) throw std::invalid_argument("rescaled: c > 0");
  MetricMeasure out = mm;
  auto cc = make_const(c);
  for (auto& e : out.g) e = make_mul(cc, e);
  out.lambda = mm.lambda / c;
  return out;
}

// Exact binary value of h, so phi +- t omega is built from the same t.
static Q step_q(double h) { return Q(h); }

VariationPoint conformal_variation_at(const MetricMeasure& mm, const ExprPtr& omega, int k,
                                      const std::vector<double>& x, double h) {
  const Q t = step_q(h);
  auto plus = node_series(shifted_phi(mm, omega, t), k, x);
  auto minus = node_series(shifted_phi(mm, omega, -t), k, x);
  VariationPoint vp;
  vp.finite_difference = (plus.v[k] - minus.v[k]) / (2 * t.get_d());
  const int K = std::max(k, 2);
  auto spec = ambient_spec(mm.n(), K, 2 * K + 2, CoeffMode::Float);
  auto base = to_jets_at(mm, spec, x);
  auto e = solve_ambient(base, K);
  auto vs = volume_series(e);
  std::vector<double> xs = x;
  Jet<double> om = field_to_jet<double>(omega, spec, xs);
  vp.formula = conformal_variation_formula(e, vs, om, k).constant_term();
  return vp;
}

double conformal_variation_integral_gap(const MetricMeasure& mm, const ExprPtr& omega, int k, const QuadRule& q,
                                        double h) {
  const Q t = step_q(h);
  auto mp = shifted_phi(mm, omega, t), mm_ = shifted_phi(mm, omega, -t);
  const double lam = mm.lambda.get_d();
  std::vector<double> mu(q.size()), dv(q.size()), rhs(q.size());
  for (size_t i = 0; i < q.size(); ++i) {
    auto c = node_series(mm, k, q.nodes[i]);
    auto a = node_series(mp, k, q.nodes[i]);
    auto b = node_series(mm_, k, q.nodes[i]);
    mu[i] = q.weights[i] * c.sqrt_g * std::exp(-c.phi);
    dv[i] = (a.v[k] - b.v[k]) / (2 * t.get_d());
    rhs[i] = eval(omega, q.nodes[i]) * lam * c.v[k - 1];
  }
  const auto& K = simd::active();
  return K.weighted_sum(mu.data(), dv.data(), mu.size()) -
         K.weighted_sum(mu.data(), rhs.data(), mu.size());
}

double SecondVariation::relative_gap() const {
  return std::abs(finite_difference - soliton_form) / std::max(std::abs(finite_difference), 1e-300);
}

SecondVariation second_variation(const MetricMeasure& mm, const ExprPtr& omega, int k, const QuadRule& q, double h) {
  const int n = mm.n();
  const double lam = mm.lambda.get_d();
  const double tau = tau_of(lam);
  const double gf = gaussian_factor(n, tau);
  const double tk = std::pow(tau, k);
  GridSeries g0 = grid_series(mm, k, q, true);
  std::vector<double> om(q.size()), om2(q.size()), grad2(q.size()), quad(q.size());
  auto vk1 = g0.v(k - 1), vk2 = g0.v(k - 2);
  auto spec = ambient_spec(n, 0, 1, CoeffMode::Float);
  for (size_t i = 0; i < q.size(); ++i) {
    std::vector<double> x = q.nodes[i];
    auto ow = field_to_jet<double>(omega, spec, x);
    auto gj = to_jets_at(mm, ambient_spec(n, 0, 0, CoeffMode::Float), x);
    auto gi = inverse(gj.g);
    std::vector<double> d(n);
    std::vector<int> ex(n + 1, 0);
    for (int a = 0; a < n; ++a) {
      ex.assign(n + 1, 0);
      ex[a] = 1;
      d[a] = ow.coeff(ex);
    }
    om[i] = ow.constant_term();
    om2[i] = om[i] * om[i];
    const auto& Lk = g0.nodes[i].L[k];
    const auto& Lk1 = g0.nodes[i].L[k - 1];
    double gg = 0, ll = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        gg += gi(a, b).constant_term() * d[a] * d[b];
        ll += (Lk[a * n + b] - lam * Lk1[a * n + b]) * d[a] * d[b];
      }
    grad2[i] = gg;
    quad[i] = (lam * vk2[i] - vk1[i]) * lam * om2[i] + ll;
  }
  SecondVariation sv;
  sv.mean_omega = gf * g0.integrate(om);
  if (std::abs(sv.mean_omega) > 1e-10) throw std::invalid_argument("second_variation: omega is not mean-zero");
  sv.quadratic_form = tk * gf * g0.integrate(quad);
  // On a soliton v_1 is the constant -(n lam - c)/2, so
  // b_k = s^{k-2}/(k-2)! (lam - s/(k-1)).
  const double s = g0.integrate(g0.v(1)) / g0.volume();
  double bk = -1;
  if (k >= 2) bk = std::pow(s, k - 2) / std::tgamma(k - 1.0) * (lam - s / (k - 1));
  std::vector<double> form(q.size());
  for (size_t i = 0; i < q.size(); ++i) form[i] = lam * om2[i] - grad2[i];
  sv.soliton_form = tk * bk * gf * g0.integrate(form);
  // Lagrange multiplier of the weighted-volume constraint.
  std::vector<double> crit(q.size());
  auto vk = g0.v(k);
  for (size_t i = 0; i < q.size(); ++i) crit[i] = vk[i] - lam * vk1[i];
  const double a = tk * g0.integrate(crit) / g0.volume();
  auto lagrangian = [&](const GridSeries& gs) { return W_functional(gs, k, tau) - a * gf * gs.volume(); };
  const Q t = step_q(h);
  double Lp = lagrangian(grid_series(shifted_phi(mm, omega, t), k, q));
  double Lm = lagrangian(grid_series(shifted_phi(mm, omega, -t), k, q));
  double L0 = lagrangian(g0);
  sv.finite_difference = (Lp - 2 * L0 + Lm) / (h * h);
  return sv;
}

SolitonConstancy soliton_w_constancy(const MetricMeasure& mm, int K, const std::vector<Q>& t_over_tau) {
  if (sgn(mm.lambda) <= 0) throw std::invalid_argument("soliton_w_constancy: lambda > 0 required");
  const Q tau = Q(1) / (2 * mm.lambda);
  auto spec = ambient_spec(mm.n(), K, 2 * K + 2, CoeffMode::Rational);
  {
    auto w = weighted_invariants(to_jets<Q>(mm, spec));
    if (!w.P.all_zero()) throw std::invalid_argument("soliton_w_constancy: P_phi does not vanish");
  }
  SolitonConstancy out;
  for (const auto& s : t_over_tau) {
    const Q c = 1 - s;  // tau(t) / tau
    if (sgn(c) <= 0) throw std::invalid_argument("soliton_w_constancy: t must stay below tau");
    auto b = to_jets<Q>(rescaled(mm, c), spec);
    auto vs = volume_series(solve_ambient(b, K));
    std::vector<Q> row;
    Q tk = 1;
    for (int k = 0; k <= K; ++k) {
      row.push_back(tk * vs.v.at(k).constant_term());
      tk *= c * tau;
    }
    out.t.push_back(s * tau);
    out.scaled.push_back(row);
  }
  const auto& r0 = out.scaled.front();
  Q fact = 1;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    Q pattern = 1;
    for (int j = 0; j < k; ++j) pattern *= r0[1];
    pattern /= fact;
    out.pattern_deviation = std::max(out.pattern_deviation, std::abs(Q(r0[k] - pattern).get_d()));
    for (const auto& row : out.scaled)
      out.max_deviation = std::max(out.max_deviation, std::abs(Q(row[k] - r0[k]).get_d()));
  }
  return out;
}

bool ConeReport::in_gamma_plus(int k) const {
  for (int j = 1; j <= k; ++j)
    if (!(p.at(j) > 0)) return false;
  return true;
}

bool ConeReport::in_lambda_minus() const {
  for (size_t j = 1; j < p.size(); ++j)
    if ((j % 2 == 1 ? p[j] : -p[j]) < 0) return false;
  return true;
}

bool ConeReport::lambda_minus_strict() const {
  for (size_t j = 1; j < p.size(); ++j)
    if (!((j % 2 == 1 ? p[j] : -p[j]) > 0)) return false;
  return true;
}

bool ConeReport::newton(int k) const { return p.at(k - 1) * p.at(k + 1) <= p.at(k) * p.at(k); }

bool ConeReport::shifted_monotone(int k) const {
  double r = -p.at(k + 1) + p.at(1) * p.at(k);
  return (k % 2 == 1 ? r : -r) >= 0;
}

ConeReport cone_membership(const std::vector<double>& p) {
  if (p.empty() || p[0] != 1.0) throw std::invalid_argument("cone_membership: p[0] must be 1");
  return ConeReport{p};
}

}  // namespace amb
