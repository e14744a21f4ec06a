#pragma once

#include <functional>
#include <string>
#include <vector>

#include "common.hpp"

namespace mfg {

enum class DriftVariant { ConstantInX, LinearQuadratic, Tabulated };

// Optimal-response vector field. The canonical argument order everywhere in
// this library is b(time, sigma, state); serialized documents and the flux
// antiderivative below follow the same convention.
//
// Variants:
//   ConstantInX      b = sigma                       (the Burgers coupling)
//   LinearQuadratic  b = (sigma + kappa x)/(1 + t kappa), kappa >= 0
//   Tabulated        caller-supplied evaluators; not serializable
//
// Bound constants are honest suprema over sigma_range x working box x
// horizon; LinearQuadratic computes them, Tabulated models must declare
// their own (no numerical bound sniffing).
struct DriftModel {
  DriftVariant variant = DriftVariant::ConstantInX;
  double kappa = 0.0;
  std::function<double(double, double, double)> b_eval;
  std::function<double(double, double, double)> db_dx_eval;
  std::function<double(double, double, double)> db_dsigma_eval;

  double sigma_lo = -1.0, sigma_hi = 1.0;
  double x_lo = -1.0, x_hi = 1.0;  // working box for bound evaluation
  double horizon = 1.0;
  double bound_b = 0.0;              // sup |b|
  double bound_dxb = 0.0;            // sup |d b / d x|
  double bound_hess_antideriv = 0.0; // sup |d^2/dx^2 of the flux antiderivative|
  bool dsigma_positive = true;

  static DriftModel constant_in_x(double sigma_lo, double sigma_hi);
  static DriftModel linear_quadratic(double kappa, double sigma_lo,
                                     double sigma_hi, double x_lo, double x_hi,
                                     double horizon);
  static DriftModel tabulated(std::function<double(double, double, double)> b,
                              std::function<double(double, double, double)> db_dx,
                              std::function<double(double, double, double)> db_dsigma,
                              double bound_b, double bound_dxb,
                              double bound_hess_antideriv, double sigma_lo,
                              double sigma_hi, bool dsigma_positive);

  double b(double t, double sigma, double x) const;
  double db_dx(double t, double sigma, double x) const;
  double db_dsigma(double t, double sigma, double x) const;

  // Flux antiderivative in the coupling variable: integral of b(t, s, x) for
  // s from 0 to u. Closed form for the analytic variants, adaptive quadrature
  // (tol 1e-10) for Tabulated.
  double antiderivative(double t, double x, double u) const;
  // Positive/negative-part antiderivatives used by the upwind flux splitting;
  // they sum to antiderivative().
  double antiderivative_pos(double t, double x, double u) const;
  double antiderivative_neg(double t, double x, double u) const;
  // Spatial derivative of the antiderivative at frozen u (the pointwise
  // source of the balance law).
  double antiderivative_dx(double t, double x, double u) const;

  // Supremum of |b| over [u_lo, u_hi] x [x_lo, x_hi] at time t; used for the
  // transport time-step restriction.
  double max_abs_b(double t, double x_lo, double x_hi, double u_lo,
                   double u_hi) const;
};

struct FlowConfig {
  int steps_per_unit_time = 200;  // fixed-step RK4 density
};

// Characteristic flows of dx/ds = b(s, sigma, x). Both act componentwise on a
// vector of states (the field is diagonal). flow_backward carries terminal
// states at time t down to time 0; flow_forward is its inverse.
std::vector<double> flow_backward(const DriftModel& m, double sigma, double t,
                                  const std::vector<double>& x,
                                  const FlowConfig& cfg = {});
std::vector<double> flow_forward(const DriftModel& m, double sigma, double t,
                                 const std::vector<double>& y,
                                 const FlowConfig& cfg = {});

// Sensitivity of the time-0 state to the coupling parameter,
//   d/dsigma x(0, t, sigma, x)
// by quadrature of the exponential-integral representation along the
// trajectory. Strictly negative componentwise when db/dsigma > 0 and t > 0.
std::vector<double> dsigma_x0(const DriftModel& m, double sigma, double t,
                              const std::vector<double>& x,
                              const FlowConfig& cfg = {});

}  // namespace mfg
