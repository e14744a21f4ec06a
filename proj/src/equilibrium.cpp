#include "equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

namespace {

std::vector<double> representative_points(const GameSpec& spec,
                                          const Measure1D& m) {
  require(spec.quantization_points >= 1, "quantization_points must be >= 1");
  if (m.pieces().empty() && m.atoms().size() <= 64) {
    // Purely atomic measures are pushed exactly, mass-weighted via repeats
    // only when weights are uniform; otherwise quantize like the rest.
    bool uniform = true;
    const double w = m.atoms().front().mass;
    for (const Atom& a : m.atoms()) uniform = uniform && a.mass == w;
    if (uniform) {
      std::vector<double> pts;
      for (const Atom& a : m.atoms()) pts.push_back(a.location);
      return pts;
    }
  }
  return quantize(m, spec.quantization_points).points;
}

}  // namespace

std::vector<double> pushed_points(const GameSpec& spec,
                                  const std::vector<double>& pts,
                                  double sigma) {
  return flow_backward(spec.drift, sigma, spec.horizon, pts, spec.flow);
}

std::vector<double> pushed_points(const GameSpec& spec, const Measure1D& m,
                                  double sigma) {
  return pushed_points(spec, representative_points(spec, m), sigma);
}

double f_value(const GameSpec& spec, const std::vector<double>& pts,
               double sigma) {
  const std::vector<double> y = pushed_points(spec, pts, sigma);
  return sigma - spec.sigma0.value_points(y);
}

double f_value(const GameSpec& spec, const Measure1D& m, double sigma) {
  return f_value(spec, representative_points(spec, m), sigma);
}

double f_prime(const GameSpec& spec, const std::vector<double>& pts,
               double sigma) {
  require(spec.sigma0.differentiable(),
          "f_prime requires a differentiable coupling");
  const std::vector<double> y = pushed_points(spec, pts, sigma);
  const std::vector<double> sens =
      dsigma_x0(spec.drift, sigma, spec.horizon, pts, spec.flow);
  double s1 = 0.0, s2 = 0.0;
  for (double v : y) {
    s1 += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(y.size());
  const double mean = s1 / n, m2 = s2 / n;
  const double base = spec.sigma0.moment_based()
                          ? spec.sigma0.base_from_moments(mean, m2)
                          : spec.sigma0.value_points(y) /
                                std::max(spec.sigma0.bump(m2), 1e-300);
  double acc = 0.0;
  for (size_t i = 0; i < y.size(); ++i)
    acc += spec.sigma0.dm(y[i], mean, m2, base) * sens[i];
  return 1.0 - acc / n;
}

double f_prime(const GameSpec& spec, const Measure1D& m, double sigma) {
  return f_prime(spec, representative_points(spec, m), sigma);
}

EquilibriumReport find_equilibria(const GameSpec& spec, const Measure1D& m,
                                  int grid_points, double root_tolerance) {
  require(grid_points >= 2, "find_equilibria requires grid_points >= 2");
  require(root_tolerance > 0.0, "root_tolerance must be positive");
  const double lo = spec.drift.sigma_lo, hi = spec.drift.sigma_hi;
  const std::vector<double> base_pts = representative_points(spec, m);
  auto F = [&](double s) { return f_value(spec, base_pts, s); };

  EquilibriumReport rep;
  rep.samples.reserve(static_cast<size_t>(grid_points));
  const double cell = (hi - lo) / static_cast<double>(grid_points - 1);
  for (int k = 0; k < grid_points; ++k) {
    const double s = k + 1 == grid_points ? hi : lo + cell * k;
    rep.samples.emplace_back(s, F(s));
  }

  const double fd_h = std::max(1e-7, 1e-6 * (hi - lo));
  auto fprime_estimate = [&](double s) {
    return (F(std::min(s + fd_h, hi)) - F(std::max(s - fd_h, lo))) /
           (std::min(s + fd_h, hi) - std::max(s - fd_h, lo));
  };

  std::vector<double> raw_roots, raw_jumps;
  for (size_t k = 0; k + 1 < rep.samples.size(); ++k) {
    double a = rep.samples[k].first, b = rep.samples[k + 1].first;
    double fa = rep.samples[k].second, fb = rep.samples[k + 1].second;
    if (fa == 0.0) {
      raw_roots.push_back(a);
      continue;
    }
    if (k + 2 == rep.samples.size() && fb == 0.0) raw_roots.push_back(b);
    if (fa * fb >= 0.0) continue;
    for (int it = 0; it < 200 && (b - a) > 1e-15 * (hi - lo); ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = F(mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (fa * fm < 0.0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    const double s = 0.5 * (a + b);
    if (std::abs(F(s)) <= root_tolerance)
      raw_roots.push_back(s);
    else
      raw_jumps.push_back(s);
  }

  // For a step coupling the only possible equilibria are its two values;
  // certify them exactly and let them absorb nearby scanned roots.
  std::vector<double> exact_roots;
  if (spec.sigma0.variant == Sigma0Variant::StepOfMean) {
    for (double cand : {spec.sigma0.left_value, spec.sigma0.right_value}) {
      if (cand < lo || cand > hi) continue;
      const std::vector<double> y = pushed_points(spec, base_pts, cand);
      if (spec.sigma0.value_points(y) == cand) exact_roots.push_back(cand);
    }
  }
  std::sort(exact_roots.begin(), exact_roots.end());
  exact_roots.erase(std::unique(exact_roots.begin(), exact_roots.end()),
                    exact_roots.end());

  auto near_exact = [&](double s) {
    for (double e : exact_roots)
      if (std::abs(s - e) <= cell) return true;
    return false;
  };
  for (double e : exact_roots) rep.roots.push_back({e, fprime_estimate(e)});
  for (double s : raw_roots)
    if (!near_exact(s)) rep.roots.push_back({s, fprime_estimate(s)});
  std::sort(rep.roots.begin(), rep.roots.end(),
            [](const EquilibriumRoot& a, const EquilibriumRoot& b) {
              return a.sigma < b.sigma;
            });
  // A jump within one grid cell of a root merges into the root.
  for (double s : raw_jumps)
    if (!near_exact(s) &&
        std::none_of(rep.roots.begin(), rep.roots.end(),
                     [&](const EquilibriumRoot& r) {
                       return std::abs(r.sigma - s) <= cell;
                     }))
      rep.jump_crossings.push_back(s);
  std::sort(rep.jump_crossings.begin(), rep.jump_crossings.end());

  if (rep.roots.empty() && rep.jump_crossings.empty())
    throw PreconditionError(
        "no root or jump found: coupling range exceeds the declared bounds");
  return rep;
}

NPlayerSolution verify_nplayer(const GameSpec& spec,
                               const std::vector<double>& points,
                               const std::vector<double>& sigmas) {
  require(points.size() == sigmas.size(), "points/sigmas size mismatch");
  require(points.size() >= 2, "n-player verification requires n >= 2");
  const size_t n = points.size();
  std::vector<double> y(n);
  for (size_t j = 0; j < n; ++j) {
    const std::vector<double> one =
        flow_backward(spec.drift, sigmas[j], spec.horizon, {points[j]}, spec.flow);
    y[j] = one[0];
  }
  double s1 = 0.0, s2 = 0.0, sphi = 0.0;
  const bool needs_phi = spec.sigma0.variant == Sigma0Variant::MeanOfFunction;
  std::vector<double> phi_vals(needs_phi ? n : 0);
  for (size_t j = 0; j < n; ++j) {
    s1 += y[j];
    s2 += y[j] * y[j];
    if (needs_phi) {
      phi_vals[j] = spec.sigma0.f(y[j]);
      sphi += phi_vals[j];
    }
  }
  NPlayerSolution sol;
  sol.sigmas = sigmas;
  sol.residuals.resize(n);
  const double nm1 = static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    const double mean = (s1 - y[i]) / nm1;
    const double m2 = (s2 - y[i] * y[i]) / nm1;
    const double base = needs_phi ? (sphi - phi_vals[i]) / nm1
                                  : spec.sigma0.base_from_moments(mean, m2);
    sol.residuals[i] = sigmas[i] - spec.sigma0.bump(m2) * base;
  }
  sol.exact = std::all_of(sol.residuals.begin(), sol.residuals.end(),
                          [](double r) { return r == 0.0; });
  return sol;
}

ThreeEquilibria construct_two_point_game(double a, double b, double t, int n) {
  require(a > 0.0 && b > 0.0 && t > 0.0, "construction requires a, b, t > 0");
  require(n >= 2, "construction requires n >= 2");
  ThreeEquilibria out;
  const double nm1 = static_cast<double>(n - 1);
  out.split_index = static_cast<int>(std::ceil(nm1 * b / (a + b)));
  out.points.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    out.points[static_cast<size_t>(j)] = j < out.split_index ? a + t : -b;
  out.pattern_low.assign(static_cast<size_t>(n), 0.0);
  out.pattern_high.assign(static_cast<size_t>(n), 1.0);
  out.pattern_mixed.assign(static_cast<size_t>(n), 0.0);
  for (int j = 0; j < out.split_index; ++j)
    out.pattern_mixed[static_cast<size_t>(j)] = 1.0;
  out.partial_sum_high = (a + b) * (out.split_index - 1) - nm1 * b;
  out.partial_sum_low = (a + b) * out.split_index - nm1 * b;
  // The ceiling choice forces these signs; failing them means broken
  // arithmetic upstream.
  require(out.partial_sum_high < 0.0 && out.partial_sum_low >= 0.0,
          "two-point construction: leave-one-out sums have wrong signs");
  return out;
}

AlternatingConstruction construct_alternating(double t, int n, double alpha) {
  require(t > 0.0, "alternating construction requires t > 0");
  require(n >= 2 && n % 2 == 0, "alternating construction requires even n >= 2");
  require(alpha > 0.0 && alpha != 1.0,
          "alternating construction requires alpha in (0,1) or (1,inf)");
  AlternatingConstruction out;
  out.magnitude =
      std::pow(std::pow(t, alpha) / static_cast<double>(n - 1), 1.0 / (1.0 - alpha));
  out.points.assign(static_cast<size_t>(n), 0.0);
  out.pattern.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    out.pattern[static_cast<size_t>(k)] = (k % 2 == 0) ? out.magnitude : -out.magnitude;
  const double a = alpha;
  auto phi = [a](double x) {
    return x == 0.0 ? 0.0 : (x > 0.0 ? std::pow(x, a) : -std::pow(-x, a));
  };
  auto phi_prime = [a](double x) { return a * std::pow(std::abs(x), a - 1.0); };
  out.coupling = Sigma0Model::mean_of_function(
      phi, phi_prime, std::numeric_limits<double>::infinity(),
      std::numeric_limits<double>::infinity());
  out.coupling_unbounded = true;
  return out;
}

std::optional<TwoPopulationConstruction> construct_two_population(
    const DriftModel& drift, const Measure1D& mu_tilde,
    const Measure1D& nu_tilde, double t, int n, const FlowConfig& cfg) {
  require(t > 0.0 && n >= 2, "two-population construction requires t > 0, n >= 2");
  require(mu_tilde.support_max() <= 0.0,
          "left population must be supported in (-inf, 0]");
  const double c = nu_tilde.support_min();
  require(c > 0.0, "right population must be supported in [c, inf), c > 0");
  require(mu_tilde.barycenter() < 0.0, "left population must have negative mean");
  require(drift.dsigma_positive,
          "drift must be strictly increasing in the coupling value");

  const double mu_mean = mu_tilde.barycenter();
  const double nu_mean = nu_tilde.barycenter();
  TwoPopulationConstruction out;
  out.lambda = -mu_mean / (nu_mean - mu_mean);
  out.mean_gap = nu_mean - mu_mean;
  out.support_gap = c;
  const double lam_n = out.lambda * static_cast<double>(n);
  const int split = static_cast<int>(std::ceil(lam_n));
  if (split <= 0 || split >= n) return std::nullopt;
  if (!(static_cast<double>(split) - lam_n < c / out.mean_gap))
    return std::nullopt;
  out.split_index = split;

  const std::vector<double> right_pts = quantize(nu_tilde, split).points;
  const std::vector<double> left_pts = quantize(mu_tilde, n - split).points;
  out.time0_points = right_pts;
  out.time0_points.insert(out.time0_points.end(), left_pts.begin(), left_pts.end());
  out.time0_sum = 0.0;
  for (double v : out.time0_points) out.time0_sum += v;
  require(out.time0_sum >= -1e-12 && out.time0_sum < c,
          "two-population construction: time-0 sum escaped [0, c)");

  const std::vector<double> high_flow = flow_forward(drift, 1.0, t, right_pts, cfg);
  const std::vector<double> low_flow = flow_forward(drift, 0.0, t, left_pts, cfg);
  out.points = high_flow;
  out.points.insert(out.points.end(), low_flow.begin(), low_flow.end());
  out.pattern_low.assign(static_cast<size_t>(n), 0.0);
  out.pattern_high.assign(static_cast<size_t>(n), 1.0);
  out.pattern_mixed.assign(static_cast<size_t>(n), 0.0);
  for (int j = 0; j < split; ++j) out.pattern_mixed[static_cast<size_t>(j)] = 1.0;
  return out;
}

std::vector<std::vector<double>> nplayer_fixed_points(
    const GameSpec& spec, const std::vector<double>& points, int starts,
    double damping, int max_iterations, double tolerance) {
  require(spec.sigma0.differentiable(),
          "fixed-point iteration requires a differentiable coupling");
  require(starts >= 1 && damping > 0.0 && damping <= 1.0,
          "fixed-point iteration: bad parameters");
  const size_t n = points.size();
  std::vector<std::vector<double>> found;
  for (int s = 0; s < starts; ++s) {
    const double s0 =
        spec.drift.sigma_lo + (spec.drift.sigma_hi - spec.drift.sigma_lo) *
                                  (s + 0.5) / static_cast<double>(starts);
    std::vector<double> sig(n, s0);
    bool converged = false;
    for (int it = 0; it < max_iterations; ++it) {
      std::vector<double> y(n);
      for (size_t j = 0; j < n; ++j)
        y[j] = flow_backward(spec.drift, sig[j], spec.horizon, {points[j]},
                             spec.flow)[0];
      double s1 = 0.0, s2 = 0.0;
      for (double v : y) {
        s1 += v;
        s2 += v * v;
      }
      double delta = 0.0;
      std::vector<double> next(n);
      const double nm1 = static_cast<double>(n - 1);
      for (size_t i = 0; i < n; ++i) {
        const double mean = (s1 - y[i]) / nm1;
        const double m2 = (s2 - y[i] * y[i]) / nm1;
        double best;
        if (spec.sigma0.moment_based()) {
          best = spec.sigma0.bump(m2) * spec.sigma0.base_from_moments(mean, m2);
        } else {
          double sphi = 0.0;
          for (size_t j = 0; j < n; ++j)
            if (j != i) sphi += spec.sigma0.f(y[j]);
          best = spec.sigma0.bump(m2) * sphi / nm1;
        }
        next[i] = (1.0 - damping) * sig[i] + damping * best;
        delta = std::max(delta, std::abs(next[i] - sig[i]));
      }
      sig = std::move(next);
      if (delta < tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) continue;
    const NPlayerSolution check = verify_nplayer(spec, points, sig);
    double worst = 0.0;
    for (double r : check.residuals) worst = std::max(worst, std::abs(r));
    if (worst > 1e-9) continue;
    bool dup = false;
    for (const auto& other : found) {
      double d = 0.0;
      for (size_t i = 0; i < n; ++i) d = std::max(d, std::abs(other[i] - sig[i]));
      dup = dup || d < 1e-6;
    }
    if (!dup) found.push_back(sig);
  }
  return found;
}

std::vector<std::vector<double>> enumerate_step_patterns(
    const GameSpec& spec, const std::vector<double>& points) {
  require(spec.sigma0.variant == Sigma0Variant::StepOfMean,
          "pattern enumeration requires a step coupling");
  require(points.size() <= 16, "pattern enumeration caps at n = 16");
  const size_t n = points.size();
  std::vector<std::vector<double>> found;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<double> sig(n);
    for (size_t i = 0; i < n; ++i)
      sig[i] = (mask >> i) & 1u ? spec.sigma0.left_value : spec.sigma0.right_value;
    const NPlayerSolution sol = verify_nplayer(spec, points, sig);
    if (sol.exact) found.push_back(std::move(sig));
  }
  return found;
}

}  // namespace mfg
