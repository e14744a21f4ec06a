#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "common.hpp"
#include "measure.hpp"

namespace mfg {

enum class Sigma0Variant {
  StepOfMean,        // alpha for mean < threshold, beta for mean >= threshold
  SmoothOfMean,      // f(mean) for a smooth scalar profile f
  MomentFunctional,  // polynomial in the first and second moments
  MeanOfFunction,    // integral of a scalar function phi against the measure
};

struct MomentTerm {
  double coef = 0.0;
  int m1_pow = 0;
  int m2_pow = 0;
};

// Scalar coupling functional sigma0 over probability measures on R. All
// built-in variants read the measure through its first two moments except
// MeanOfFunction, which integrates phi directly. An optional cutoff radius
// multiplies the functional by a smooth bump in the second moment vanishing
// outside radius^2.
struct Sigma0Model {
  Sigma0Variant variant = Sigma0Variant::StepOfMean;

  double threshold = 0.0;
  double left_value = 1.0;
  double right_value = 0.0;

  std::function<double(double)> f;        // smooth profile or phi
  std::function<double(double)> f_prime;  // its derivative

  std::vector<MomentTerm> terms;

  std::optional<double> cutoff_radius;
  double uniform_bound = 0.0;  // sup |sigma0|
  double dm_bound = 0.0;       // sup |flat derivative|; 0 when unavailable

  static Sigma0Model step_of_mean(double threshold, double left_value,
                                  double right_value);
  static Sigma0Model smooth_of_mean(std::function<double(double)> f,
                                    std::function<double(double)> f_prime,
                                    double uniform_bound, double dm_bound);
  static Sigma0Model moment_functional(std::vector<MomentTerm> terms,
                                       double uniform_bound, double dm_bound);
  static Sigma0Model mean_of_function(std::function<double(double)> phi,
                                      std::function<double(double)> phi_prime,
                                      double uniform_bound, double dm_bound);

  bool differentiable() const { return variant != Sigma0Variant::StepOfMean; }
  bool moment_based() const { return variant != Sigma0Variant::MeanOfFunction; }

  // Cutoff bump in the second moment: identically 1 below radius^2/2, zero
  // above radius^2, smooth in between. Returns 1 when no cutoff is set.
  double bump(double second_moment) const;
  double bump_derivative(double second_moment) const;

  // Functional value before the cutoff, from moments alone. Refuses
  // MeanOfFunction.
  double base_from_moments(double mean, double second_moment) const;

  // Full value on a point cloud / a piecewise measure (exact per component;
  // MeanOfFunction integrates phi with fixed-order Gauss-Legendre on pieces).
  double value_points(const double* xs, size_t n) const;
  double value_points(const std::vector<double>& xs) const {
    return value_points(xs.data(), xs.size());
  }
  double value_measure(const Measure1D& m) const;

  // Flat derivative at location x given the measure's moments and the base
  // (pre-cutoff) functional value there. Refuses StepOfMean.
  double dm(double x, double mean, double second_moment,
            double base_value) const;
};

}  // namespace mfg
