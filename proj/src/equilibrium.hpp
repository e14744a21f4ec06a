#pragma once

#include <optional>
#include <vector>

#include "drift.hpp"
#include "measure.hpp"
#include "sigma0.hpp"

namespace mfg {

// A scalar-coupled game: optimal-response drift, coupling functional, time
// horizon. Coupling functionals here read measures on R, so the state
// dimension is 1.
struct GameSpec {
  DriftModel drift;
  Sigma0Model sigma0;
  double horizon = 1.0;
  FlowConfig flow;
  int quantization_points = 64;  // point count used to push forward densities
};

// Time-0 states of the representative points of m under the backward flow at
// coupling value sigma. Piecewise measures are replaced by their optimal
// point approximation first.
std::vector<double> pushed_points(const GameSpec& spec, const Measure1D& m,
                                  double sigma);
std::vector<double> pushed_points(const GameSpec& spec,
                                  const std::vector<double>& pts, double sigma);

// Equilibrium map F(sigma) = sigma - sigma0(time-0 push-forward of m).
// Its zeros are the consistent coupling values.
double f_value(const GameSpec& spec, const Measure1D& m, double sigma);
double f_value(const GameSpec& spec, const std::vector<double>& pts,
               double sigma);

// dF/dsigma by quadrature over the representative points; at least 1 under
// the monotone-coupling assumptions. Refuses step couplings.
double f_prime(const GameSpec& spec, const Measure1D& m, double sigma);
double f_prime(const GameSpec& spec, const std::vector<double>& pts,
               double sigma);

struct EquilibriumRoot {
  double sigma = 0.0;
  double f_prime_estimate = 0.0;
};

struct EquilibriumReport {
  std::vector<EquilibriumRoot> roots;
  std::vector<double> jump_crossings;  // sign changes without a zero
  std::vector<std::pair<double, double>> samples;  // scanned (sigma, F)
};

// Scans F over the declared coupling range, refines continuous sign changes
// by bisection, records discontinuous ones separately, and certifies the two
// candidate values of a step coupling in closed form. Refuses when no root
// and no jump is found (the coupling then escapes its declared range).
EquilibriumReport find_equilibria(const GameSpec& spec, const Measure1D& m,
                                  int grid_points = 2048,
                                  double root_tolerance = 1e-9);

struct NPlayerSolution {
  std::vector<double> sigmas;
  std::vector<double> residuals;
  bool exact = false;  // every residual identically zero
};

// Residuals of the n-player consistency system: each player's coupling value
// against the functional of the other players' time-0 states. Step couplings
// compare by exact inequalities on the computed means.
NPlayerSolution verify_nplayer(const GameSpec& spec,
                               const std::vector<double>& points,
                               const std::vector<double>& sigmas);

// Two-point non-uniqueness construction for the unit step coupling: players
// start at a + t (first `split_index`) and -b (rest). Three candidate
// patterns solve the n-player system exactly; the mixed one mixes the two
// constant answers.
struct ThreeEquilibria {
  std::vector<double> points;
  std::vector<double> pattern_low;   // all players at the lower value 0
  std::vector<double> pattern_high;  // all players at the upper value 1
  std::vector<double> pattern_mixed;
  int split_index = 0;
  double partial_sum_high = 0.0;  // leave-one-out sum for i <= split (< 0)
  double partial_sum_low = 0.0;   // leave-one-out sum for i > split (>= 0)
};

ThreeEquilibria construct_two_point_game(double a, double b, double t, int n);

// Alternating-sign construction with phi(x) = sign(x) |x|^alpha: all players
// start at the origin and split into two opposite camps of magnitude b_n
// solving phi(t b_n) = (n-1) b_n. The coupling integrates phi against the
// final empirical measure and is unbounded, which the caller must keep in
// mind when pairing it with bounded-range drifts.
struct AlternatingConstruction {
  std::vector<double> points;   // all zeros
  std::vector<double> pattern;  // +magnitude, -magnitude, ...
  double magnitude = 0.0;
  bool coupling_unbounded = true;
  Sigma0Model coupling;
};

AlternatingConstruction construct_alternating(double t, int n, double alpha);

// Two-population construction: optimal point approximations of a left
// population (nonpositive support, negative mean) and a right population
// (support at least c > 0) are flowed forward under opposite coupling
// expectations. Empty when the rounding condition on ceil(lambda n) fails
// for this n.
struct TwoPopulationConstruction {
  std::vector<double> points;       // terminal states fed to the game
  std::vector<double> time0_points; // the underlying optimal approximations
  std::vector<double> pattern_low;
  std::vector<double> pattern_high;
  std::vector<double> pattern_mixed;
  int split_index = 0;
  double lambda = 0.0;
  double mean_gap = 0.0;    // difference of the population means
  double support_gap = 0.0; // c, the right population's support minimum
  double time0_sum = 0.0;   // in [0, c) by construction
};

std::optional<TwoPopulationConstruction> construct_two_population(
    const DriftModel& drift, const Measure1D& mu_tilde,
    const Measure1D& nu_tilde, double t, int n, const FlowConfig& cfg = {});

// Damped best-response iteration for differentiable couplings from evenly
// spaced constant starts; returns distinct converged solutions.
std::vector<std::vector<double>> nplayer_fixed_points(
    const GameSpec& spec, const std::vector<double>& points, int starts = 8,
    double damping = 0.5, int max_iterations = 500, double tolerance = 1e-12);

// Exhaustive search over the 2^n two-value patterns of a step coupling
// (n <= 16); returns every pattern that verifies exactly.
std::vector<std::vector<double>> enumerate_step_patterns(
    const GameSpec& spec, const std::vector<double>& points);

}  // namespace mfg
