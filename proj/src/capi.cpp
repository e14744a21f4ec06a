#include "mfglab/mfglab.h"

#include <cstring>
#include <string>

#include "analysis.hpp"
#include "common.hpp"
#include "drift.hpp"
#include "equilibrium.hpp"
#include "experiment.hpp"
#include "measure.hpp"
#include "pde.hpp"
#include "sigma0.hpp"

struct mfg_measure {
  mfg::Measure1D m;
};
struct mfg_drift {
  mfg::DriftModel d;
};
struct mfg_sigma0 {
  mfg::Sigma0Model s;
};
struct mfg_state {
  mfg::GridState s;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Translates core exceptions to status codes around every API body.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return MFG_OK;
  } catch (const mfg::ConfigError& e) {
    return set_error(MFG_ERR_CONFIG, e.what());
  } catch (const mfg::PreconditionError& e) {
    return set_error(MFG_ERR_REFUSED, e.what());
  } catch (const mfg::NumericalError& e) {
    return set_error(MFG_ERR_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return set_error(MFG_ERR_INVALID, e.what());
  }
}

int need(bool ok, const char* what) {
  if (ok) return MFG_OK;
  return set_error(MFG_ERR_INVALID, std::string("invalid argument: ") + what);
}

mfg::FlowConfig flow_of(int steps_per_unit_time) {
  mfg::FlowConfig cfg;
  if (steps_per_unit_time > 0) cfg.steps_per_unit_time = steps_per_unit_time;
  return cfg;
}

int copy_out(const std::string& text, char* buf, size_t cap, size_t* written) {
  if (written) *written = text.size() + 1;
  if (!buf) return text.size() + 1 <= cap ? MFG_OK : MFG_ERR_INVALID;
  if (cap < text.size() + 1)
    return set_error(MFG_ERR_INVALID, "output buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return MFG_OK;
}

}  // namespace

extern "C" {

const char* mfg_version(void) { return "1.0.0"; }

const char* mfg_last_error_message(void) { return g_last_error.c_str(); }

/* ---- measures ---- */

int mfg_measure_parse_json(const char* text, mfg_measure** out) {
  if (int rc = need(text && out, "mfg_measure_parse_json")) return rc;
  return guarded([&] { *out = new mfg_measure{mfg::Measure1D::from_json(text)}; });
}

int mfg_measure_uniform(double left, double right, mfg_measure** out) {
  if (int rc = need(out != nullptr, "mfg_measure_uniform")) return rc;
  return guarded([&] { *out = new mfg_measure{mfg::Measure1D::uniform(left, right)}; });
}

int mfg_measure_dirac(double location, mfg_measure** out) {
  if (int rc = need(out != nullptr, "mfg_measure_dirac")) return rc;
  return guarded([&] { *out = new mfg_measure{mfg::Measure1D::dirac(location)}; });
}

void mfg_measure_free(mfg_measure* m) { delete m; }

int mfg_measure_to_json(const mfg_measure* m, char* buf, size_t cap,
                        size_t* written) {
  if (int rc = need(m != nullptr, "mfg_measure_to_json")) return rc;
  return guarded([&] {
    const std::string text = m->m.to_json();
    if (copy_out(text, buf, cap, written) != MFG_OK)
      throw mfg::ConfigError("output buffer too small");
  });
}

int mfg_measure_cdf(const mfg_measure* m, double x, double* out) {
  if (int rc = need(m && out, "mfg_measure_cdf")) return rc;
  return guarded([&] { *out = m->m.cdf(x); });
}

int mfg_measure_quantile_cut(const mfg_measure* m, int j, int n, double* out) {
  if (int rc = need(m && out, "mfg_measure_quantile_cut")) return rc;
  return guarded([&] { *out = m->m.quantile_cut(j, n); });
}

int mfg_measure_barycenter(const mfg_measure* m, double* out) {
  if (int rc = need(m && out, "mfg_measure_barycenter")) return rc;
  return guarded([&] { *out = m->m.barycenter(); });
}

int mfg_measure_second_moment(const mfg_measure* m, double* out) {
  if (int rc = need(m && out, "mfg_measure_second_moment")) return rc;
  return guarded([&] { *out = m->m.second_moment(); });
}

int mfg_measure_quantize(const mfg_measure* m, int n, double* points_out,
                         double* w2_out) {
  if (int rc = need(m && points_out && w2_out && n >= 1, "mfg_measure_quantize"))
    return rc;
  return guarded([&] {
    const mfg::Quantization q = mfg::quantize(m->m, n);
    std::memcpy(points_out, q.points.data(), q.points.size() * sizeof(double));
    *w2_out = q.w2;
  });
}

int mfg_measure_w2(const mfg_measure* a, const mfg_measure* b, double* out) {
  if (int rc = need(a && b && out, "mfg_measure_w2")) return rc;
  return guarded([&] { *out = mfg::w2_1d(a->m, b->m); });
}

/* ---- drift models ---- */

int mfg_drift_constant_in_x(double sigma_lo, double sigma_hi, mfg_drift** out) {
  if (int rc = need(out != nullptr, "mfg_drift_constant_in_x")) return rc;
  return guarded([&] {
    *out = new mfg_drift{mfg::DriftModel::constant_in_x(sigma_lo, sigma_hi)};
  });
}

int mfg_drift_linear_quadratic(double kappa, double sigma_lo, double sigma_hi,
                               double x_lo, double x_hi, double horizon,
                               mfg_drift** out) {
  if (int rc = need(out != nullptr, "mfg_drift_linear_quadratic")) return rc;
  return guarded([&] {
    *out = new mfg_drift{mfg::DriftModel::linear_quadratic(
        kappa, sigma_lo, sigma_hi, x_lo, x_hi, horizon)};
  });
}

int mfg_drift_tabulated(mfg_scalar_fn3 b, mfg_scalar_fn3 db_dx,
                        mfg_scalar_fn3 db_dsigma, void* ctx, double bound_b,
                        double bound_dxb, double bound_hess_antideriv,
                        double sigma_lo, double sigma_hi, int dsigma_positive,
                        mfg_drift** out) {
  if (int rc = need(b && out, "mfg_drift_tabulated")) return rc;
  return guarded([&] {
    auto wrap = [ctx](mfg_scalar_fn3 fn) {
      return fn ? std::function<double(double, double, double)>(
                      [fn, ctx](double t, double s, double x) {
                        return fn(t, s, x, ctx);
                      })
                : std::function<double(double, double, double)>();
    };
    *out = new mfg_drift{mfg::DriftModel::tabulated(
        wrap(b), wrap(db_dx), wrap(db_dsigma), bound_b, bound_dxb,
        bound_hess_antideriv, sigma_lo, sigma_hi, dsigma_positive != 0)};
  });
}

void mfg_drift_free(mfg_drift* d) { delete d; }

int mfg_drift_antiderivative(const mfg_drift* d, double t, double x, double u,
                             double* out) {
  if (int rc = need(d && out, "mfg_drift_antiderivative")) return rc;
  return guarded([&] { *out = d->d.antiderivative(t, x, u); });
}

int mfg_drift_flow_backward(const mfg_drift* d, double sigma, double t,
                            const double* x, size_t n, int steps_per_unit_time,
                            double* out) {
  if (int rc = need(d && x && out && n > 0, "mfg_drift_flow_backward")) return rc;
  return guarded([&] {
    const std::vector<double> res = mfg::flow_backward(
        d->d, sigma, t, std::vector<double>(x, x + n), flow_of(steps_per_unit_time));
    std::memcpy(out, res.data(), n * sizeof(double));
  });
}

int mfg_drift_flow_forward(const mfg_drift* d, double sigma, double t,
                           const double* y, size_t n, int steps_per_unit_time,
                           double* out) {
  if (int rc = need(d && y && out && n > 0, "mfg_drift_flow_forward")) return rc;
  return guarded([&] {
    const std::vector<double> res = mfg::flow_forward(
        d->d, sigma, t, std::vector<double>(y, y + n), flow_of(steps_per_unit_time));
    std::memcpy(out, res.data(), n * sizeof(double));
  });
}

int mfg_drift_dsigma_x0(const mfg_drift* d, double sigma, double t,
                        const double* x, size_t n, int steps_per_unit_time,
                        double* out) {
  if (int rc = need(d && x && out && n > 0, "mfg_drift_dsigma_x0")) return rc;
  return guarded([&] {
    const std::vector<double> res = mfg::dsigma_x0(
        d->d, sigma, t, std::vector<double>(x, x + n), flow_of(steps_per_unit_time));
    std::memcpy(out, res.data(), n * sizeof(double));
  });
}

/* ---- coupling functionals ---- */

int mfg_sigma0_step_of_mean(double threshold, double left_value,
                            double right_value, mfg_sigma0** out) {
  if (int rc = need(out != nullptr, "mfg_sigma0_step_of_mean")) return rc;
  return guarded([&] {
    *out = new mfg_sigma0{
        mfg::Sigma0Model::step_of_mean(threshold, left_value, right_value)};
  });
}

int mfg_sigma0_smooth_of_mean(mfg_scalar_fn1 f, mfg_scalar_fn1 fprime,
                              void* ctx, double uniform_bound, double dm_bound,
                              mfg_sigma0** out) {
  if (int rc = need(f && fprime && out, "mfg_sigma0_smooth_of_mean")) return rc;
  return guarded([&] {
    *out = new mfg_sigma0{mfg::Sigma0Model::smooth_of_mean(
        [f, ctx](double x) { return f(x, ctx); },
        [fprime, ctx](double x) { return fprime(x, ctx); }, uniform_bound,
        dm_bound)};
  });
}

int mfg_sigma0_mean_of_function(mfg_scalar_fn1 phi, mfg_scalar_fn1 phiprime,
                                void* ctx, double uniform_bound,
                                double dm_bound, mfg_sigma0** out) {
  if (int rc = need(phi && out, "mfg_sigma0_mean_of_function")) return rc;
  return guarded([&] {
    *out = new mfg_sigma0{mfg::Sigma0Model::mean_of_function(
        [phi, ctx](double x) { return phi(x, ctx); },
        phiprime ? std::function<double(double)>([phiprime, ctx](double x) {
          return phiprime(x, ctx);
        })
                 : std::function<double(double)>(),
        uniform_bound, dm_bound)};
  });
}

int mfg_sigma0_moment_functional(const double* coef, const int* m1_pow,
                                 const int* m2_pow, size_t n_terms,
                                 double uniform_bound, double dm_bound,
                                 mfg_sigma0** out) {
  if (int rc = need(coef && m1_pow && m2_pow && out && n_terms > 0,
                    "mfg_sigma0_moment_functional"))
    return rc;
  return guarded([&] {
    std::vector<mfg::MomentTerm> terms(n_terms);
    for (size_t i = 0; i < n_terms; ++i)
      terms[i] = {coef[i], m1_pow[i], m2_pow[i]};
    *out = new mfg_sigma0{mfg::Sigma0Model::moment_functional(
        std::move(terms), uniform_bound, dm_bound)};
  });
}

int mfg_sigma0_set_cutoff(mfg_sigma0* s, double radius) {
  if (int rc = need(s && radius > 0.0, "mfg_sigma0_set_cutoff")) return rc;
  s->s.cutoff_radius = radius;
  return MFG_OK;
}

void mfg_sigma0_free(mfg_sigma0* s) { delete s; }

int mfg_sigma0_eval_points(const mfg_sigma0* s, const double* pts, size_t n,
                           double* out) {
  if (int rc = need(s && pts && out && n > 0, "mfg_sigma0_eval_points")) return rc;
  return guarded([&] { *out = s->s.value_points(pts, n); });
}

/* ---- equilibrium ---- */

namespace {

mfg::GameSpec spec_of(const mfg_drift* d, const mfg_sigma0* s, double t,
                      int quantization_points, int steps_per_unit_time) {
  mfg::GameSpec spec{d->d, s->s, t, flow_of(steps_per_unit_time),
                     quantization_points > 0 ? quantization_points : 64};
  return spec;
}

}  // namespace

int mfg_f_value(const mfg_drift* d, const mfg_sigma0* s, const mfg_measure* m,
                double t, double sigma, int quantization_points,
                int steps_per_unit_time, double* out) {
  if (int rc = need(d && s && m && out, "mfg_f_value")) return rc;
  return guarded([&] {
    *out = mfg::f_value(spec_of(d, s, t, quantization_points, steps_per_unit_time),
                        m->m, sigma);
  });
}

int mfg_f_prime(const mfg_drift* d, const mfg_sigma0* s, const mfg_measure* m,
                double t, double sigma, int quantization_points,
                int steps_per_unit_time, double* out) {
  if (int rc = need(d && s && m && out, "mfg_f_prime")) return rc;
  return guarded([&] {
    *out = mfg::f_prime(spec_of(d, s, t, quantization_points, steps_per_unit_time),
                        m->m, sigma);
  });
}

int mfg_find_equilibria(const mfg_drift* d, const mfg_sigma0* s,
                        const mfg_measure* m, double t, int grid_points,
                        double root_tolerance, double* roots, size_t roots_cap,
                        size_t* n_roots, double* jumps, size_t jumps_cap,
                        size_t* n_jumps) {
  if (int rc = need(d && s && m && n_roots && n_jumps, "mfg_find_equilibria"))
    return rc;
  return guarded([&] {
    const mfg::EquilibriumReport rep = mfg::find_equilibria(
        spec_of(d, s, t, 64, 0), m->m, grid_points > 0 ? grid_points : 2048,
        root_tolerance > 0.0 ? root_tolerance : 1e-9);
    *n_roots = rep.roots.size();
    *n_jumps = rep.jump_crossings.size();
    if (roots) {
      if (roots_cap < rep.roots.size())
        throw mfg::ConfigError("roots buffer too small");
      for (size_t i = 0; i < rep.roots.size(); ++i) roots[i] = rep.roots[i].sigma;
    }
    if (jumps) {
      if (jumps_cap < rep.jump_crossings.size())
        throw mfg::ConfigError("jumps buffer too small");
      for (size_t i = 0; i < rep.jump_crossings.size(); ++i)
        jumps[i] = rep.jump_crossings[i];
    }
  });
}

int mfg_verify_nplayer(const mfg_drift* d, const mfg_sigma0* s, double t,
                       const double* points, const double* sigmas, size_t n,
                       int steps_per_unit_time, double* residuals, int* exact) {
  if (int rc = need(d && s && points && sigmas && residuals && exact && n >= 2,
                    "mfg_verify_nplayer"))
    return rc;
  return guarded([&] {
    const mfg::NPlayerSolution sol = mfg::verify_nplayer(
        spec_of(d, s, t, 64, steps_per_unit_time),
        std::vector<double>(points, points + n),
        std::vector<double>(sigmas, sigmas + n));
    std::memcpy(residuals, sol.residuals.data(), n * sizeof(double));
    *exact = sol.exact ? 1 : 0;
  });
}

int mfg_construct_threshold_game(double a, double b, double t, int n,
                                 double* points, double* mixed_pattern,
                                 int* threshold_index) {
  if (int rc = need(points && mixed_pattern && threshold_index && n >= 2,
                    "mfg_construct_threshold_game"))
    return rc;
  return guarded([&] {
    const mfg::ThreeEquilibria eq = mfg::construct_two_point_game(a, b, t, n);
    std::memcpy(points, eq.points.data(), eq.points.size() * sizeof(double));
    std::memcpy(mixed_pattern, eq.pattern_mixed.data(),
                eq.pattern_mixed.size() * sizeof(double));
    *threshold_index = eq.split_index;
  });
}

int mfg_construct_alternating(double t, int n, double alpha, double* magnitude,
                              double* pattern) {
  if (int rc = need(magnitude && pattern && n >= 2, "mfg_construct_alternating"))
    return rc;
  return guarded([&] {
    const mfg::AlternatingConstruction alt = mfg::construct_alternating(t, n, alpha);
    *magnitude = alt.magnitude;
    std::memcpy(pattern, alt.pattern.data(), alt.pattern.size() * sizeof(double));
  });
}

int mfg_construct_two_population(const mfg_drift* d, const mfg_measure* mu_tilde,
                                 const mfg_measure* nu_tilde, double t, int n,
                                 int steps_per_unit_time, double* points,
                                 double* mixed_pattern, int* split_index,
                                 int* constructed) {
  if (int rc = need(d && mu_tilde && nu_tilde && points && mixed_pattern &&
                        split_index && constructed && n >= 2,
                    "mfg_construct_two_population"))
    return rc;
  return guarded([&] {
    const auto two = mfg::construct_two_population(
        d->d, mu_tilde->m, nu_tilde->m, t, n, flow_of(steps_per_unit_time));
    if (!two) {
      *constructed = 0;
      return;
    }
    *constructed = 1;
    std::memcpy(points, two->points.data(), two->points.size() * sizeof(double));
    std::memcpy(mixed_pattern, two->pattern_mixed.data(),
                two->pattern_mixed.size() * sizeof(double));
    *split_index = two->split_index;
  });
}

/* ---- finite-volume solver ---- */

int mfg_pde_run(const mfg_drift* d, const mfg_sigma0* initial, int n_players,
                const double* axis_lo, const double* axis_hi, const int* cells,
                int dim, double cfl, double viscosity, double t_end,
                mfg_state** out) {
  if (int rc = need(d && initial && axis_lo && axis_hi && cells && out &&
                        (dim == 1 || dim == 2),
                    "mfg_pde_run"))
    return rc;
  return guarded([&] {
    std::vector<mfg::GridAxis> axes;
    for (int a = 0; a < dim; ++a) axes.push_back({axis_lo[a], axis_hi[a], cells[a]});
    const mfg::Grid grid = mfg::make_grid(axes);
    const mfg::GridState init =
        mfg::initial_from_sigma0(initial->s, grid, n_players, 1);
    const mfg::SchemeConfig cfg{cfl > 0.0 ? cfl : 0.45, viscosity, false};
    *out = new mfg_state{mfg::run(init, d->d, cfg, t_end)};
  });
}

void mfg_state_free(mfg_state* s) { delete s; }

int mfg_state_size(const mfg_state* s, size_t* out) {
  if (int rc = need(s && out, "mfg_state_size")) return rc;
  *out = s->s.u.size();
  return MFG_OK;
}

int mfg_state_values(const mfg_state* s, double* buf, size_t cap) {
  if (int rc = need(s && buf, "mfg_state_values")) return rc;
  if (cap < s->s.u.size())
    return set_error(MFG_ERR_INVALID, "state buffer too small");
  std::memcpy(buf, s->s.u.data(), s->s.u.size() * sizeof(double));
  return MFG_OK;
}

int mfg_state_time(const mfg_state* s, double* out) {
  if (int rc = need(s && out, "mfg_state_time")) return rc;
  *out = s->s.t;
  return MFG_OK;
}

int mfg_state_l1_distance(const mfg_state* a, const mfg_state* b, double* out) {
  if (int rc = need(a && b && out, "mfg_state_l1_distance")) return rc;
  return guarded([&] { *out = mfg::l1_distance(a->s, b->s); });
}

int mfg_state_total_variation(const mfg_state* s, double* out) {
  if (int rc = need(s && out, "mfg_state_total_variation")) return rc;
  return guarded([&] { *out = mfg::total_variation(s->s); });
}

int mfg_state_minmax(const mfg_state* s, double* mn, double* mx) {
  if (int rc = need(s && mn && mx, "mfg_state_minmax")) return rc;
  return guarded([&] { mfg::state_minmax(s->s, *mn, *mx); });
}

/* ---- analysis ---- */

int mfg_theorem_bound(int n, int d, double t, double eps, double m_b,
                      double l_b, double h_b, double grad_integral,
                      double* out) {
  if (int rc = need(out != nullptr, "mfg_theorem_bound")) return rc;
  return guarded([&] {
    mfg::BoundInputs b;
    b.n_players = n;
    b.d = d;
    b.t = t;
    b.eps = eps;
    b.bound_b = m_b;
    b.bound_dxb = l_b;
    b.bound_hess_antideriv = h_b;
    b.grad_integral = grad_integral;
    *out = mfg::theorem_bound(b);
  });
}

int mfg_corollary_bound(int d, double t, double eps, double l_b,
                        double uniform_bound, double radius, double* out) {
  if (int rc = need(out != nullptr, "mfg_corollary_bound")) return rc;
  return guarded([&] {
    mfg::BoundInputs b;
    b.d = d;
    b.t = t;
    b.eps = eps;
    b.bound_dxb = l_b;
    b.uniform_bound = uniform_bound;
    b.radius = radius;
    *out = mfg::corollary_bound(b);
  });
}

int mfg_grad_integral_bound(double dm_bound, int n, int d, double radius,
                            double* out) {
  if (int rc = need(out != nullptr, "mfg_grad_integral_bound")) return rc;
  return guarded([&] { *out = mfg::grad_integral_bound(dm_bound, n, d, radius); });
}

int mfg_ball_asymptotic(int n, double* out) {
  if (int rc = need(out != nullptr, "mfg_ball_asymptotic")) return rc;
  return guarded([&] { *out = mfg::ball_asymptotic(n); });
}

int mfg_seminorm_indicator(double radius, int d, double* out) {
  if (int rc = need(out != nullptr, "mfg_seminorm_indicator")) return rc;
  return guarded([&] { *out = mfg::seminorm_indicator(radius, d); });
}

int mfg_select_equilibrium(const mfg_sigma0* s, double mean, double t,
                           double x_lo, double x_hi, int cells, double cfl,
                           double viscosity, double* value, int* resolved) {
  if (int rc = need(s && value && resolved, "mfg_select_equilibrium")) return rc;
  return guarded([&] {
    const mfg::Grid grid = mfg::make_grid({{x_lo, x_hi, cells}});
    const mfg::SchemeConfig cfg{cfl > 0.0 ? cfl : 0.45, viscosity, false};
    const mfg::SelectionResult res =
        mfg::select_equilibrium(s->s, mean, t, grid, cfg);
    *value = res.value;
    *resolved = res.resolved ? 1 : 0;
  });
}

int mfg_fit_rate(const double* eps, const double* err, size_t n, double* slope,
                 double* intercept, double* r_squared) {
  if (int rc = need(eps && err && slope && intercept && r_squared && n >= 3,
                    "mfg_fit_rate"))
    return rc;
  return guarded([&] {
    std::vector<std::pair<double, double>> pairs;
    for (size_t i = 0; i < n; ++i) pairs.emplace_back(eps[i], err[i]);
    const mfg::RateFit fit = mfg::fit_rate(pairs);
    *slope = fit.slope;
    *intercept = fit.intercept;
    *r_squared = fit.r_squared;
  });
}

/* ---- experiments ---- */

int mfg_run_experiment(const char* subcommand, const char* config_json,
                       const char* out_dir, int threads) {
  if (int rc = need(subcommand && config_json, "mfg_run_experiment")) return rc;
  return guarded([&] {
    mfg::run_experiment(subcommand, config_json, out_dir ? out_dir : ".",
                        threads);
  });
}

int mfg_dump_config(const char* subcommand, const char* config_json, char* buf,
                    size_t cap, size_t* written) {
  if (int rc = need(subcommand && config_json, "mfg_dump_config")) return rc;
  return guarded([&] {
    const std::string text = mfg::dump_config(subcommand, config_json);
    if (copy_out(text, buf, cap, written) != MFG_OK)
      throw mfg::ConfigError("output buffer too small");
  });
}

} /* extern "C" */
