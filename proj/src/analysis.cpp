#include "analysis.hpp"

#include <algorithm>
#include <cmath>

#include "drift.hpp"

namespace mfg {

namespace {

double log_unit_ball_volume(int n) {
  // vol(B_1 in R^n) = pi^{n/2} / Gamma(n/2 + 1)
  return 0.5 * n * std::log(M_PI) - log_gamma_stirling(0.5 * n + 1.0);
}

}  // namespace

double theorem_bound(const BoundInputs& b) {
  require(b.n_players >= 1 && b.d >= 1, "bound requires n, d >= 1");
  require(b.eps >= 0.0 && b.t >= 0.0, "bound requires eps, t >= 0");
  const double nd = static_cast<double>(b.n_players) * b.d;
  return std::pow(b.eps, b.n_players) * std::pow(nd, 3.5) *
         std::exp(b.bound_dxb * b.d * (2.0 * b.n_players + 1.0) * b.t) *
         (2.0 * b.bound_hess_antideriv +
          (b.bound_dxb + b.bound_b + 2.0) * b.grad_integral);
}

double corollary_bound(const BoundInputs& b) {
  require(b.d >= 1, "bound requires d >= 1");
  require(b.eps >= 0.0 && b.t >= 0.0, "bound requires eps, t >= 0");
  return b.eps * b.uniform_bound * std::exp(2.0 * b.bound_dxb * b.d * b.t) *
         (1.0 + std::pow(b.radius, b.d) *
                    std::pow(2.0 * M_PI * M_E / b.d, 0.5 * b.d));
}

double grad_integral_bound(double dm_bound, int n_players, int d,
                           double radius) {
  require(n_players >= 1 && d >= 1 && radius >= 0.0 && dm_bound >= 0.0,
          "grad_integral_bound requires nonnegative inputs");
  const int nd = n_players * d;
  return std::pow(n_players, 0.5 * (nd - 1)) * std::pow(radius, nd) *
         std::exp(log_unit_ball_volume(nd)) * dm_bound;
}

double ball_asymptotic(int n) {
  require(n >= 1, "ball_asymptotic requires n >= 1");
  return std::exp(0.5 * std::log(static_cast<double>(n)) +
                  log_unit_ball_volume(n) / n);
}

double seminorm_indicator(double radius, int d) {
  require(radius > 0.0 && d >= 1, "seminorm requires radius > 0, d >= 1");
  return std::exp(d * std::log(radius) +
                  0.5 * d * (std::log(2.0 * M_PI) + 1.0 - std::log(d)));
}

std::vector<double> seminorm_indicator_sequence(double radius, int d,
                                                const std::vector<int>& sizes) {
  require(radius > 0.0 && d >= 1, "seminorm requires radius > 0, d >= 1");
  std::vector<double> out;
  out.reserve(sizes.size());
  for (int n : sizes) {
    require(n >= 1, "sequence sizes must be >= 1");
    const int nd = n * d;
    // vol(B_{sqrt(n) R} in dim nd)^{d/n}
    const double log_vol =
        nd * std::log(std::sqrt(static_cast<double>(n)) * radius) +
        log_unit_ball_volume(nd);
    out.push_back(std::exp(log_vol * d / n));
  }
  return out;
}

SelectionResult select_equilibrium(const Sigma0Model& f, double mean, double t,
                                   const Grid& grid, const SchemeConfig& cfg) {
  require(grid.dim() == 1, "selection runs on the barycenter line");
  require(f.variant == Sigma0Variant::StepOfMean ||
              f.variant == Sigma0Variant::SmoothOfMean,
          "selection requires a barycentric coupling");
  const GridAxis& ax = grid.axes[0];
  require(mean > ax.lo && mean < ax.hi, "query mean lies outside the grid");

  // The barycenter line carries the scalar conservation law with flux u^2/2;
  // its characteristics are the constant-coupling trajectories.
  double range_lo = 0.0, range_hi = 0.0;
  if (f.variant == Sigma0Variant::StepOfMean) {
    range_lo = std::min(f.left_value, f.right_value);
    range_hi = std::max(f.left_value, f.right_value);
  } else {
    range_lo = -f.uniform_bound;
    range_hi = f.uniform_bound;
  }
  const double pad = std::max(1.0, range_hi - range_lo);
  const DriftModel burgers =
      DriftModel::constant_in_x(range_lo - pad, range_hi + pad);

  GridState st = initial_from_sigma0(f, grid, 1, 1);
  st = run(st, burgers, cfg, t);

  const double dx = ax.dx();
  const int idx = std::min(ax.cells - 1,
                           std::max(0, static_cast<int>((mean - ax.lo) / dx)));
  SelectionResult out;
  out.value = st.u[static_cast<size_t>(idx)];

  // Shock detector: a cell jump that concentrates a fixed fraction of the
  // total oscillation marks underresolution near the query point.
  double mn, mx;
  state_minmax(st, mn, mx);
  const double osc = mx - mn;
  out.shock_distance = static_cast<double>(ax.cells);
  if (osc > 0.0) {
    for (int i = 0; i + 1 < ax.cells; ++i) {
      if (std::abs(st.u[static_cast<size_t>(i + 1)] - st.u[static_cast<size_t>(i)]) >=
          0.1 * osc) {
        const double dist = std::abs(static_cast<double>(i) + 0.5 -
                                     (mean - ax.lo) / dx) ;
        out.shock_distance = std::min(out.shock_distance, dist);
      }
    }
  }
  out.resolved = out.shock_distance > 2.0;
  return out;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  require(pairs.size() >= 3, "fit_rate requires at least 3 pairs");
  for (const auto& p : pairs)
    require(p.first > 0.0 && p.second > 0.0,
            "fit_rate requires strictly positive pairs");
  RateFit fit;
  fit.pairs = pairs;
  const double n = static_cast<double>(pairs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : pairs) {
    const double x = std::log(p.first), y = std::log(p.second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  require(vx > 0.0, "fit_rate requires at least two distinct eps values");
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r_squared = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return fit;
}

}  // namespace mfg
