#include "drift.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

namespace {

constexpr long kMaxFlowSteps = 10000000;  // refuse beyond 1e7 RK4 steps

long step_count(double t, const FlowConfig& cfg) {
  require(cfg.steps_per_unit_time >= 1, "steps_per_unit_time must be >= 1");
  require(t >= 0.0 && std::isfinite(t), "flow horizon must be finite and >= 0");
  const double raw = t * cfg.steps_per_unit_time;
  if (raw > static_cast<double>(kMaxFlowSteps))
    throw PreconditionError("flow step count exceeds 1e7; refuse");
  return std::max(1L, static_cast<long>(std::ceil(raw)));
}

double pos(double v) { return v > 0.0 ? v : 0.0; }
double neg(double v) { return v < 0.0 ? v : 0.0; }

}  // namespace

DriftModel DriftModel::constant_in_x(double sigma_lo, double sigma_hi) {
  require(sigma_lo < sigma_hi, "drift requires sigma_lo < sigma_hi");
  DriftModel m;
  m.variant = DriftVariant::ConstantInX;
  m.sigma_lo = sigma_lo;
  m.sigma_hi = sigma_hi;
  m.bound_b = std::max(std::abs(sigma_lo), std::abs(sigma_hi));
  m.bound_dxb = 0.0;
  m.bound_hess_antideriv = 0.0;
  m.dsigma_positive = true;
  return m;
}

DriftModel DriftModel::linear_quadratic(double kappa, double sigma_lo,
                                        double sigma_hi, double x_lo,
                                        double x_hi, double horizon) {
  require(kappa >= 0.0, "linear_quadratic requires kappa >= 0");
  require(sigma_lo < sigma_hi, "drift requires sigma_lo < sigma_hi");
  require(x_lo < x_hi, "working box requires x_lo < x_hi");
  require(horizon >= 0.0 && 1.0 + horizon * kappa > 0.0,
          "1 + t*kappa must stay positive on the horizon");
  DriftModel m;
  m.variant = DriftVariant::LinearQuadratic;
  m.kappa = kappa;
  m.sigma_lo = sigma_lo;
  m.sigma_hi = sigma_hi;
  m.x_lo = x_lo;
  m.x_hi = x_hi;
  m.horizon = horizon;
  // |b| = |sigma + kappa x| / (1 + t kappa), maximal at t = 0 and a corner of
  // the box. The antiderivative (u^2/2 + kappa x u)/(1 + t kappa) is linear
  // in x, so its x-Hessian vanishes.
  double corner = 0.0;
  for (double s : {sigma_lo, sigma_hi})
    for (double x : {x_lo, x_hi}) corner = std::max(corner, std::abs(s + kappa * x));
  m.bound_b = corner;
  m.bound_dxb = kappa;
  m.bound_hess_antideriv = 0.0;
  m.dsigma_positive = true;
  return m;
}

DriftModel DriftModel::tabulated(
    std::function<double(double, double, double)> b,
    std::function<double(double, double, double)> db_dx,
    std::function<double(double, double, double)> db_dsigma, double bound_b,
    double bound_dxb, double bound_hess_antideriv, double sigma_lo,
    double sigma_hi, bool dsigma_positive) {
  require(static_cast<bool>(b), "tabulated drift requires a b evaluator");
  require(bound_b >= 0.0 && bound_dxb >= 0.0 && bound_hess_antideriv >= 0.0 &&
              std::isfinite(bound_b) && std::isfinite(bound_dxb) &&
              std::isfinite(bound_hess_antideriv),
          "tabulated drift requires finite nonnegative bound constants");
  require(sigma_lo < sigma_hi, "drift requires sigma_lo < sigma_hi");
  DriftModel m;
  m.variant = DriftVariant::Tabulated;
  m.b_eval = std::move(b);
  m.db_dx_eval = std::move(db_dx);
  m.db_dsigma_eval = std::move(db_dsigma);
  m.bound_b = bound_b;
  m.bound_dxb = bound_dxb;
  m.bound_hess_antideriv = bound_hess_antideriv;
  m.sigma_lo = sigma_lo;
  m.sigma_hi = sigma_hi;
  m.dsigma_positive = dsigma_positive;
  return m;
}

double DriftModel::b(double t, double sigma, double x) const {
  switch (variant) {
    case DriftVariant::ConstantInX:
      return sigma;
    case DriftVariant::LinearQuadratic:
      return (sigma + kappa * x) / (1.0 + t * kappa);
    case DriftVariant::Tabulated:
      return b_eval(t, sigma, x);
  }
  return 0.0;
}

double DriftModel::db_dx(double t, double sigma, double x) const {
  switch (variant) {
    case DriftVariant::ConstantInX:
      return 0.0;
    case DriftVariant::LinearQuadratic:
      return kappa / (1.0 + t * kappa);
    case DriftVariant::Tabulated:
      require(static_cast<bool>(db_dx_eval), "tabulated drift lacks db/dx");
      return db_dx_eval(t, sigma, x);
  }
  return 0.0;
}

double DriftModel::db_dsigma(double t, double sigma, double x) const {
  switch (variant) {
    case DriftVariant::ConstantInX:
      return 1.0;
    case DriftVariant::LinearQuadratic:
      return 1.0 / (1.0 + t * kappa);
    case DriftVariant::Tabulated:
      require(static_cast<bool>(db_dsigma_eval), "tabulated drift lacks db/dsigma");
      return db_dsigma_eval(t, sigma, x);
  }
  return 0.0;
}

double DriftModel::antiderivative(double t, double x, double u) const {
  switch (variant) {
    case DriftVariant::ConstantInX:
      return 0.5 * u * u;
    case DriftVariant::LinearQuadratic:
      return (0.5 * u * u + kappa * x * u) / (1.0 + t * kappa);
    case DriftVariant::Tabulated:
      return adaptive_simpson([&](double s) { return b_eval(t, s, x); },
                              0.0, u, 1e-10);
  }
  return 0.0;
}

double DriftModel::antiderivative_pos(double t, double x, double u) const {
  switch (variant) {
    case DriftVariant::ConstantInX: {
      const double up = pos(u);
      return 0.5 * up * up;
    }
    case DriftVariant::LinearQuadratic: {
      // b = c (s + kappa x) with c = 1/(1 + t kappa) > 0; the positive part
      // integrates to c [((u + kx)^+)^2 - ((kx)^+)^2] / 2.
      const double c = 1.0 / (1.0 + t * kappa);
      const double a = pos(u + kappa * x);
      const double b0 = pos(kappa * x);
      return 0.5 * c * (a * a - b0 * b0);
    }
    case DriftVariant::Tabulated:
      return adaptive_simpson([&](double s) { return pos(b_eval(t, s, x)); },
                              0.0, u, 1e-10);
  }
  return 0.0;
}

double DriftModel::antiderivative_neg(double t, double x, double u) const {
  switch (variant) {
    case DriftVariant::ConstantInX: {
      const double un = neg(u);
      return 0.5 * un * un;
    }
    case DriftVariant::LinearQuadratic: {
      const double c = 1.0 / (1.0 + t * kappa);
      const double a = neg(u + kappa * x);
      const double b0 = neg(kappa * x);
      return 0.5 * c * (a * a - b0 * b0);
    }
    case DriftVariant::Tabulated:
      return adaptive_simpson([&](double s) { return neg(b_eval(t, s, x)); },
                              0.0, u, 1e-10);
  }
  return 0.0;
}

double DriftModel::antiderivative_dx(double t, double x, double u) const {
  switch (variant) {
    case DriftVariant::ConstantInX:
      return 0.0;
    case DriftVariant::LinearQuadratic:
      return kappa * u / (1.0 + t * kappa);
    case DriftVariant::Tabulated: {
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      return (antiderivative(t, x + h, u) - antiderivative(t, x - h, u)) /
             (2.0 * h);
    }
  }
  return 0.0;
}

double DriftModel::max_abs_b(double t, double x_lo_q, double x_hi_q,
                             double u_lo, double u_hi) const {
  switch (variant) {
    case DriftVariant::ConstantInX:
      return std::max(std::abs(u_lo), std::abs(u_hi));
    case DriftVariant::LinearQuadratic: {
      double v = 0.0;
      for (double s : {u_lo, u_hi})
        for (double x : {x_lo_q, x_hi_q})
          v = std::max(v, std::abs(b(t, s, x)));
      return v;
    }
    case DriftVariant::Tabulated:
      return bound_b;
  }
  return bound_b;
}

namespace {

// One RK4 sweep of dx/ds = b(s, sigma, x) from s0 to s1 over `steps` steps,
// acting on every component of x in place.
void rk4_sweep(const DriftModel& m, double sigma, double s0, double s1,
               long steps, std::vector<double>& x) {
  const double h = (s1 - s0) / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) {
    const double s = s0 + h * static_cast<double>(k);
    for (double& xi : x) {
      const double k1 = m.b(s, sigma, xi);
      const double k2 = m.b(s + 0.5 * h, sigma, xi + 0.5 * h * k1);
      const double k3 = m.b(s + 0.5 * h, sigma, xi + 0.5 * h * k2);
      const double k4 = m.b(s + h, sigma, xi + h * k3);
      xi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
}

}  // namespace

std::vector<double> flow_backward(const DriftModel& m, double sigma, double t,
                                  const std::vector<double>& x,
                                  const FlowConfig& cfg) {
  std::vector<double> out = x;
  if (t == 0.0) return out;
  rk4_sweep(m, sigma, t, 0.0, step_count(t, cfg), out);
  return out;
}

std::vector<double> flow_forward(const DriftModel& m, double sigma, double t,
                                 const std::vector<double>& y,
                                 const FlowConfig& cfg) {
  std::vector<double> out = y;
  if (t == 0.0) return out;
  rk4_sweep(m, sigma, 0.0, t, step_count(t, cfg), out);
  return out;
}

std::vector<double> dsigma_x0(const DriftModel& m, double sigma, double t,
                              const std::vector<double>& x,
                              const FlowConfig& cfg) {
  std::vector<double> out(x.size(), 0.0);
  if (t == 0.0) return out;
  const long steps = step_count(t, cfg);
  const std::vector<double> x0 = flow_backward(m, sigma, t, x, cfg);
  const double h = t / static_cast<double>(steps);
  // Along the trajectory run forward from time 0, accumulate
  //   I(tau) = integral of db/dx, and
  //   J(tau) = integral of exp(-I) db/dsigma,
  // so the sensitivity at time 0 is -J(t). The three quantities are advanced
  // jointly with RK4.
  for (size_t i = 0; i < x.size(); ++i) {
    double xi = x0[i], I = 0.0, J = 0.0;
    auto rhs = [&](double s, double xv, double Iv, double& dx, double& dI,
                   double& dJ) {
      dx = m.b(s, sigma, xv);
      dI = m.db_dx(s, sigma, xv);
      dJ = std::exp(-Iv) * m.db_dsigma(s, sigma, xv);
    };
    for (long k = 0; k < steps; ++k) {
      const double s = h * static_cast<double>(k);
      double dx1, dI1, dJ1, dx2, dI2, dJ2, dx3, dI3, dJ3, dx4, dI4, dJ4;
      rhs(s, xi, I, dx1, dI1, dJ1);
      rhs(s + 0.5 * h, xi + 0.5 * h * dx1, I + 0.5 * h * dI1, dx2, dI2, dJ2);
      rhs(s + 0.5 * h, xi + 0.5 * h * dx2, I + 0.5 * h * dI2, dx3, dI3, dJ3);
      rhs(s + h, xi + h * dx3, I + h * dI3, dx4, dI4, dJ4);
      xi += h / 6.0 * (dx1 + 2.0 * dx2 + 2.0 * dx3 + dx4);
      I += h / 6.0 * (dI1 + 2.0 * dI2 + 2.0 * dI3 + dI4);
      J += h / 6.0 * (dJ1 + 2.0 * dJ2 + 2.0 * dJ3 + dJ4);
    }
    out[i] = -J;
  }
  return out;
}

}  // namespace mfg
