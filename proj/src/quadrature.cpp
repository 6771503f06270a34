#include "amb/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "amb/simd.hpp"

namespace amb {

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: m >= 1");
  x.assign(m, 0);
  w.assign(m, 0);
  for (int i = 0; i < m; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p = std::legendre(m, t), pm = m > 1 ? std::legendre(m - 1, t) : 1.0;
      dp = m * (t * p - pm) / (t * t - 1);
      double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    double p = std::legendre(m, t), pm = m > 1 ? std::legendre(m - 1, t) : 1.0;
    dp = m * (t * p - pm) / (t * t - 1);
    x[m - 1 - i] = t;
    w[m - 1 - i] = 2 / ((1 - t * t) * dp * dp);
  }
}

static void product(QuadRule& q, const std::vector<std::vector<double>>& ax, const std::vector<std::vector<double>>& aw) {
  const int n = static_cast<int>(ax.size());
  q.n = n;
  std::vector<size_t> idx(n, 0);
  for (;;) {
    std::vector<double> x(n);
    double w = 1;
    for (int d = 0; d < n; ++d) {
      x[d] = ax[d][idx[d]];
      w *= aw[d][idx[d]];
    }
    q.nodes.push_back(x);
    q.weights.push_back(w);
    int d = n - 1;
    while (d >= 0 && ++idx[d] == ax[d].size()) idx[d--] = 0;
    if (d < 0) break;
  }
}

QuadRule torus_rule(const std::vector<int>& N) {
  std::vector<std::vector<double>> ax, aw;
  for (int m : N) {
    if (m < 1) throw std::invalid_argument("torus_rule: grid must be positive");
    std::vector<double> x(m), w(m, 2 * std::numbers::pi / m);
    for (int i = 0; i < m; ++i) x[i] = 2 * std::numbers::pi * i / m;
    ax.push_back(x);
    aw.push_back(w);
  }
  QuadRule q;
  product(q, ax, aw);
  return q;
}

QuadRule sphere_rule(int n_theta, int n_phi) {
  std::vector<double> s, ws;
  gauss_legendre(n_theta, s, ws);
  std::vector<double> th(n_theta), wt(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    th[i] = std::asin(s[i]);
    wt[i] = ws[i] / std::cos(th[i]);  // ds = cos(theta) d(theta); sqrt(det g) restores it
  }
  std::vector<double> ph(n_phi), wp(n_phi, 2 * std::numbers::pi / n_phi);
  for (int i = 0; i < n_phi; ++i) ph[i] = 2 * std::numbers::pi * i / n_phi;
  QuadRule q;
  product(q, {th, ph}, {wt, wp});
  return q;
}

QuadRule box_rule(int n, int m, double L) {
  std::vector<double> x, w;
  gauss_legendre(m, x, w);
  for (auto& v : x) v *= L;
  for (auto& v : w) v *= L;
  QuadRule q;
  product(q, std::vector<std::vector<double>>(n, x), std::vector<std::vector<double>>(n, w));
  return q;
}

QuadRule rule_for(const MetricMeasure& mm, const std::vector<int>& grid) {
  const int n = mm.n();
  switch (mm.chart.topology) {
    case Topology::Torus:
      return torus_rule(grid.empty() ? std::vector<int>(n, 16) : grid);
    case Topology::Sphere:
      if (n != 2) throw std::invalid_argument("sphere quadrature is implemented for S^2 only");
      return sphere_rule(grid.size() > 0 ? grid[0] : 12, grid.size() > 1 ? grid[1] : 24);
    case Topology::Plane: {
      if (sgn(mm.lambda) <= 0) throw std::invalid_argument("plane quadrature needs lambda > 0 (Gaussian weight)");
      double L = 8 / std::sqrt(mm.lambda.get_d());
      return box_rule(n, grid.empty() ? 24 : grid[0], L);
    }
  }
  throw std::logic_error("unreachable");
}

double integrate(const QuadRule& q, const std::vector<double>& f) {
  if (f.size() != q.size()) throw std::invalid_argument("integrate: size mismatch");
  return simd::active().weighted_sum(q.weights.data(), f.data(), f.size());
}

double integrate(const QuadRule& q, const std::vector<double>& f, const std::vector<double>& h) {
  if (f.size() != q.size() || h.size() != q.size()) throw std::invalid_argument("integrate: size mismatch");
  return simd::active().weighted_dot(q.weights.data(), f.data(), h.data(), f.size());
}

}  // namespace amb
