// Global quantities built from per-node jet solves: the functionals F_k and
// W_k, their flow derivatives, critical-point residuals, the conformal first
// variation of v_k, the second variation of W_k, and pointwise cone tests.
#pragma once

#include <vector>

#include "amb/ambient.hpp"
#include "amb/quadrature.hpp"
#include "amb/scenario.hpp"

namespace amb {

// Per-node data from one ambient solve at x (float backend, D = 2K+2).
struct NodeSeries {
  std::vector<double> v;               // v_0..v_K
  std::vector<std::vector<double>> L;  // L_k^{ij} row-major, k = 0..K (filled on request)
  double P2 = 0;                       // |P_phi|^2
  double sqrt_g = 0, phi = 0;
};

NodeSeries node_series(const MetricMeasure& mm, int K, const std::vector<double>& x, bool with_L = false,
                       AmbientConvention conv = {});

struct GridSeries {
  QuadRule rule;
  int n = 0, K = 0;
  double lambda = 0;
  std::vector<double> mu;  // weight * sqrt(det g) * e^{-phi}
  std::vector<NodeSeries> nodes;

  double integrate(const std::vector<double>& f) const;  // int f e^{-phi} dvol
  double volume() const;
  std::vector<double> v(int k) const;
  std::vector<double> p(int k) const;  // k! v_k
};

GridSeries grid_series(const MetricMeasure& mm, int K, const QuadRule& q, bool with_L = false,
                       AmbientConvention conv = {});

double tau_of(double lambda);                      // 1 / (2 lambda)
double gaussian_factor(int n, double tau);         // (4 pi tau)^{-n/2}
double F_functional(const GridSeries& gs, int k);  // int v_k dmu
double W_functional(const GridSeries& gs, int k, double tau);

// d/dt F_1 along the flow from -p_2 + p_1^2, next to int |P_phi|^2.
struct TwoRoutes {
  double via_pk = 0, via_curvature = 0;
  double gap() const;
};
TwoRoutes monotonicity_f1(const GridSeries& gs);
// d/dt W_k = (1/k!) int tau^k (-p_{k+1} + p_1 p_k) (4 pi tau)^{-n/2} e^{-phi} dvol.
double w_derivative(const GridSeries& gs, int k, double tau);
// k = 1: the W_1 rate next to tau int |P_phi|^2 (4 pi tau)^{-n/2} e^{-phi} dvol.
TwoRoutes w1_derivative(const GridSeries& gs, double tau);

// v_k - lambda v_{k-1} minus its weighted mean, per node.
std::vector<double> critical_residual(const GridSeries& gs, int k);

// Pointwise first variation of v_k under phi -> phi + t omega: central
// difference against omega lambda v_{k-1} + div*(L_k grad omega).
struct VariationPoint {
  double finite_difference = 0, formula = 0;
  double gap() const { return std::abs(finite_difference - formula); }
};
VariationPoint conformal_variation_at(const MetricMeasure& mm, const ExprPtr& omega, int k,
                                      const std::vector<double>& x, double h = 1e-4);
// Integrated version: int dv_k dmu - int omega lambda v_{k-1} dmu, with dv_k
// taken by central differences at every node.
double conformal_variation_integral_gap(const MetricMeasure& mm, const ExprPtr& omega, int k, const QuadRule& q,
                                        double h = 1e-4);

MetricMeasure with_phi(const MetricMeasure& mm, const ExprPtr& phi);
MetricMeasure shifted_phi(const MetricMeasure& mm, const ExprPtr& omega, const Q& t);
// (c g, phi, lambda / c).
MetricMeasure rescaled(const MetricMeasure& mm, const Q& c);

// Second variation of W_k on the volume constraint at a critical point.
struct SecondVariation {
  double quadratic_form = 0;    // tau^k int [(lam v_{k-2} - v_{k-1}) lam w^2 + (L_k - lam L_{k-1}) dw.dw]
  double soliton_form = 0;      // tau^k b_k int (lam w^2 - |dw|^2), b_1 = -1
  double finite_difference = 0;  // second difference of W_k - a WtdVol
  double mean_omega = 0;
  double relative_gap() const;  // |finite_difference - soliton_form| / |finite_difference|
};
SecondVariation second_variation(const MetricMeasure& mm, const ExprPtr& omega, int k, const QuadRule& q,
                                 double h = 1e-3);

// tau(t)^k v_k(t) at the base point along the shrinker family
// g(t) = (1 - t/tau) g, tau(t) = tau - t (exact rational arithmetic).  The
// base data must satisfy P_phi = 0 exactly.
struct SolitonConstancy {
  std::vector<Q> t;                    // sample times
  std::vector<std::vector<Q>> scaled;  // scaled[i][k] = tau(t_i)^k v_k(t_i), k = 0..K
  double max_deviation = 0;            // over samples, against t = 0
  double pattern_deviation = 0;        // against (tau v_1)^k / k!
};
SolitonConstancy soliton_w_constancy(const MetricMeasure& mm, int K, const std::vector<Q>& t_over_tau);

// Pointwise cone data from p_1..p_K at one point.
struct ConeReport {
  std::vector<double> p;  // p[0] = 1
  bool in_gamma_plus(int k) const;  // p_j > 0, j <= k
  bool in_lambda_minus() const;     // (-1)^{j+1} p_j >= 0 for all computed j
  bool lambda_minus_strict() const;
  bool newton(int k) const;  // p_{k-1} p_{k+1} <= p_k^2
  // (-1)^{k+1} (-p_{k+1} + p_1 p_k) >= 0
  bool shifted_monotone(int k) const;
};
ConeReport cone_membership(const std::vector<double>& p);

}  // namespace amb
