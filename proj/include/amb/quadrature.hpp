// Quadrature rules on charts.  Weights are coordinate weights: for a metric g,
// sum_q w_q sqrt(det g(x_q)) f(x_q) approximates the Riemannian integral of f.
#pragma once

#include <string>
#include <vector>

#include "amb/scenario.hpp"

namespace amb {

struct QuadRule {
  int n = 0;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
  size_t size() const { return weights.size(); }
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w);

// Trapezoid rule on [0, 2pi)^n with N[i] points per axis.
QuadRule torus_rule(const std::vector<int>& N);
// Round S^2 in latitude/longitude coordinates (theta, phi): Gauss-Legendre in
// sin(theta) times trapezoid in phi.
QuadRule sphere_rule(int n_theta, int n_phi);
// Gauss-Legendre product rule on [-L, L]^n.
QuadRule box_rule(int n, int m, double L);

// Rule matching the chart topology; grid gives points per axis.
QuadRule rule_for(const MetricMeasure& mm, const std::vector<int>& grid);

// sum_q w_q f_q using the active SIMD kernel.
double integrate(const QuadRule& q, const std::vector<double>& f);
double integrate(const QuadRule& q, const std::vector<double>& f, const std::vector<double>& h);

}  // namespace amb
