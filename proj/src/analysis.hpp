#pragma once

#include <vector>

#include "pde.hpp"
#include "sigma0.hpp"

namespace mfg {

// Inputs to the explicit error-bound formulas: game size, horizon, noise
// amplitude, drift bound constants, and the gradient integral of the
// discretized initial coupling.
struct BoundInputs {
  int n_players = 1;
  int d = 1;
  double t = 0.0;
  double eps = 0.0;
  double bound_b = 0.0;
  double bound_dxb = 0.0;
  double bound_hess_antideriv = 0.0;
  double grad_integral = 0.0;
  double uniform_bound = 0.0;
  double dm_bound = 0.0;
  double radius = 0.0;
};

// eps^N (Nd)^{7/2} e^{L d (2N+1) t} (2 H + (L + M + 2) grad_integral).
double theorem_bound(const BoundInputs& b);

// eps * uniform_bound * e^{2 L d t} * (1 + R^d (2 pi e / d)^{d/2}).
double corollary_bound(const BoundInputs& b);

// N^{(Nd-1)/2} R^{Nd} vol(unit ball in dim Nd) * dm_bound.
double grad_integral_bound(double dm_bound, int n_players, int d,
                           double radius);

// A_n = sqrt(n) * vol(unit ball in R^n)^{1/n}; decreasing to sqrt(2 pi e).
double ball_asymptotic(int n);

// Closed-form seminorm of the indicator of the radius-R second-moment ball:
// R^d (2 pi e / d)^{d/2}.
double seminorm_indicator(double radius, int d);
// Finite-size diagnostic sequence converging to the closed form:
// vol(ball of radius sqrt(N) R in dim N d)^{d/N} evaluated at each N.
std::vector<double> seminorm_indicator_sequence(double radius, int d,
                                                const std::vector<int>& sizes);

struct SelectionResult {
  double value = 0.0;
  bool resolved = true;        // false: within two cells of a detected shock
  double shock_distance = 0.0; // cells to the nearest detected shock
};

// Entropy-selected equilibrium for barycentric couplings paired with the
// drift b = sigma: solve the scalar conservation law on the barycenter line
// from initial data f and read the cell containing `mean` at time t.
SelectionResult select_equilibrium(const Sigma0Model& f, double mean, double t,
                                   const Grid& grid, const SchemeConfig& cfg);

struct RateFit {
  std::vector<std::pair<double, double>> pairs;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of log(error) against log(eps). Requires at least three
// strictly positive pairs.
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

}  // namespace mfg
