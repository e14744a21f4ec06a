#ifndef MFGLAB_H
#define MFGLAB_H

/* mfglab: equilibrium computation and entropy-selection laboratory for
 * scalar-coupled mean field games.
 *
 * C API over the C++ core. All objects are opaque handles created and
 * destroyed through these functions. Every fallible call returns a status
 * code; on failure a thread-local message is available through
 * mfg_last_error_message(). Output buffers are caller-owned.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MFG_API __declspec(dllexport)
#elif defined(__GNUC__)
#define MFG_API __attribute__((visibility("default")))
#else
#define MFG_API
#endif

/* Status codes. Chosen to double as CLI exit codes. */
#define MFG_OK 0
#define MFG_ERR_CONFIG 2    /* malformed input document or option        */
#define MFG_ERR_NUMERICAL 3 /* solver state became non-finite            */
#define MFG_ERR_REFUSED 4   /* a stated precondition does not hold       */
#define MFG_ERR_INVALID 5   /* null handle, bad argument, small buffer   */

typedef struct mfg_measure mfg_measure;
typedef struct mfg_drift mfg_drift;
typedef struct mfg_sigma0 mfg_sigma0;
typedef struct mfg_state mfg_state;

typedef double (*mfg_scalar_fn1)(double x, void* ctx);
typedef double (*mfg_scalar_fn3)(double t, double sigma, double x, void* ctx);

MFG_API const char* mfg_version(void);
MFG_API const char* mfg_last_error_message(void);

/* ---- probability measures on R (atoms + uniform-density pieces) ---- */

MFG_API int mfg_measure_parse_json(const char* text, mfg_measure** out);
MFG_API int mfg_measure_uniform(double left, double right, mfg_measure** out);
MFG_API int mfg_measure_dirac(double location, mfg_measure** out);
MFG_API void mfg_measure_free(mfg_measure* m);
MFG_API int mfg_measure_to_json(const mfg_measure* m, char* buf, size_t cap,
                                size_t* written);
MFG_API int mfg_measure_cdf(const mfg_measure* m, double x, double* out);
MFG_API int mfg_measure_quantile_cut(const mfg_measure* m, int j, int n,
                                     double* out);
MFG_API int mfg_measure_barycenter(const mfg_measure* m, double* out);
MFG_API int mfg_measure_second_moment(const mfg_measure* m, double* out);
/* points_out must hold n doubles; points come back nondecreasing. */
MFG_API int mfg_measure_quantize(const mfg_measure* m, int n,
                                 double* points_out, double* w2_out);
MFG_API int mfg_measure_w2(const mfg_measure* a, const mfg_measure* b,
                           double* out);

/* ---- optimal-response drift models b(t, sigma, x) ---- */

MFG_API int mfg_drift_constant_in_x(double sigma_lo, double sigma_hi,
                                    mfg_drift** out);
MFG_API int mfg_drift_linear_quadratic(double kappa, double sigma_lo,
                                       double sigma_hi, double x_lo,
                                       double x_hi, double horizon,
                                       mfg_drift** out);
/* Caller supplies evaluators plus honest bound constants; ctx is passed
 * through unchanged. dsigma_positive declares that db/dsigma > 0. */
MFG_API int mfg_drift_tabulated(mfg_scalar_fn3 b, mfg_scalar_fn3 db_dx,
                                mfg_scalar_fn3 db_dsigma, void* ctx,
                                double bound_b, double bound_dxb,
                                double bound_hess_antideriv, double sigma_lo,
                                double sigma_hi, int dsigma_positive,
                                mfg_drift** out);
MFG_API void mfg_drift_free(mfg_drift* d);
MFG_API int mfg_drift_antiderivative(const mfg_drift* d, double t, double x,
                                     double u, double* out);
/* Flows integrate the characteristic ODE with fixed-step RK4 and act
 * componentwise on n states. steps_per_unit_time <= 0 selects the default
 * (200). */
MFG_API int mfg_drift_flow_backward(const mfg_drift* d, double sigma, double t,
                                    const double* x, size_t n,
                                    int steps_per_unit_time, double* out);
MFG_API int mfg_drift_flow_forward(const mfg_drift* d, double sigma, double t,
                                   const double* y, size_t n,
                                   int steps_per_unit_time, double* out);
MFG_API int mfg_drift_dsigma_x0(const mfg_drift* d, double sigma, double t,
                                const double* x, size_t n,
                                int steps_per_unit_time, double* out);

/* ---- coupling functionals sigma0 ---- */

MFG_API int mfg_sigma0_step_of_mean(double threshold, double left_value,
                                    double right_value, mfg_sigma0** out);
MFG_API int mfg_sigma0_smooth_of_mean(mfg_scalar_fn1 f, mfg_scalar_fn1 fprime,
                                      void* ctx, double uniform_bound,
                                      double dm_bound, mfg_sigma0** out);
MFG_API int mfg_sigma0_mean_of_function(mfg_scalar_fn1 phi,
                                        mfg_scalar_fn1 phiprime, void* ctx,
                                        double uniform_bound, double dm_bound,
                                        mfg_sigma0** out);
/* sigma0(m) = sum_k coef[k] * mean(m)^m1_pow[k] * second_moment(m)^m2_pow[k] */
MFG_API int mfg_sigma0_moment_functional(const double* coef, const int* m1_pow,
                                         const int* m2_pow, size_t n_terms,
                                         double uniform_bound, double dm_bound,
                                         mfg_sigma0** out);
/* Multiplies the functional by a smooth bump in the second moment that
 * vanishes outside radius^2. */
MFG_API int mfg_sigma0_set_cutoff(mfg_sigma0* s, double radius);
MFG_API void mfg_sigma0_free(mfg_sigma0* s);
MFG_API int mfg_sigma0_eval_points(const mfg_sigma0* s, const double* pts,
                                   size_t n, double* out);

/* ---- equilibrium computations ---- */

MFG_API int mfg_f_value(const mfg_drift* d, const mfg_sigma0* s,
                        const mfg_measure* m, double t, double sigma,
                        int quantization_points, int steps_per_unit_time,
                        double* out);
MFG_API int mfg_f_prime(const mfg_drift* d, const mfg_sigma0* s,
                        const mfg_measure* m, double t, double sigma,
                        int quantization_points, int steps_per_unit_time,
                        double* out);
MFG_API int mfg_find_equilibria(const mfg_drift* d, const mfg_sigma0* s,
                                const mfg_measure* m, double t,
                                int grid_points, double root_tolerance,
                                double* roots, size_t roots_cap,
                                size_t* n_roots, double* jumps,
                                size_t jumps_cap, size_t* n_jumps);
/* residuals must hold n doubles; *exact is set to 1 when every residual is
 * identically zero. */
MFG_API int mfg_verify_nplayer(const mfg_drift* d, const mfg_sigma0* s,
                               double t, const double* points,
                               const double* sigmas, size_t n,
                               int steps_per_unit_time, double* residuals,
                               int* exact);
/* Two-point threshold construction: fills points (n), the mixed sigma
 * pattern (n) and the threshold index. The all-zero and all-one patterns are
 * implicit. */
MFG_API int mfg_construct_threshold_game(double a, double b, double t, int n,
                                         double* points, double* mixed_pattern,
                                         int* threshold_index);
/* Alternating-sign construction with phi(x) = sign(x)|x|^alpha, alpha != 1. */
MFG_API int mfg_construct_alternating(double t, int n, double alpha,
                                      double* magnitude, double* pattern);
/* Two-population construction. *constructed is 0 when the ceiling condition
 * rejects this n (not an error). */
MFG_API int mfg_construct_two_population(const mfg_drift* d,
                                         const mfg_measure* mu_tilde,
                                         const mfg_measure* nu_tilde, double t,
                                         int n, int steps_per_unit_time,
                                         double* points, double* mixed_pattern,
                                         int* split_index, int* constructed);

/* ---- finite-volume transport solver ---- */

/* Solves the discretized coupling-transport balance law from initial data
 * sigma0 evaluated on empirical measures of n_players points per cell.
 * dim is the total grid dimension (1 or 2); axis arrays have dim entries.
 * viscosity >= 0 adds an implicit diffusion solve per step. */
MFG_API int mfg_pde_run(const mfg_drift* d, const mfg_sigma0* initial,
                        int n_players, const double* axis_lo,
                        const double* axis_hi, const int* cells, int dim,
                        double cfl, double viscosity, double t_end,
                        mfg_state** out);
MFG_API void mfg_state_free(mfg_state* s);
MFG_API int mfg_state_size(const mfg_state* s, size_t* out);
MFG_API int mfg_state_values(const mfg_state* s, double* buf, size_t cap);
MFG_API int mfg_state_time(const mfg_state* s, double* out);
MFG_API int mfg_state_l1_distance(const mfg_state* a, const mfg_state* b,
                                  double* out);
MFG_API int mfg_state_total_variation(const mfg_state* s, double* out);
MFG_API int mfg_state_minmax(const mfg_state* s, double* mn, double* mx);

/* ---- error-bound evaluators and selection ---- */

MFG_API int mfg_theorem_bound(int n, int d, double t, double eps, double m_b,
                              double l_b, double h_b, double grad_integral,
                              double* out);
MFG_API int mfg_corollary_bound(int d, double t, double eps, double l_b,
                                double uniform_bound, double radius,
                                double* out);
MFG_API int mfg_grad_integral_bound(double dm_bound, int n, int d,
                                    double radius, double* out);
MFG_API int mfg_ball_asymptotic(int n, double* out);
MFG_API int mfg_seminorm_indicator(double radius, int d, double* out);
/* Entropy-selected equilibrium for barycentric couplings with drift b = sigma.
 * *resolved is 0 when the query point is within two cells of a detected
 * shock; the value is still reported. */
MFG_API int mfg_select_equilibrium(const mfg_sigma0* s, double mean, double t,
                                   double x_lo, double x_hi, int cells,
                                   double cfl, double viscosity, double* value,
                                   int* resolved);
MFG_API int mfg_fit_rate(const double* eps, const double* err, size_t n,
                         double* slope, double* intercept, double* r_squared);

/* ---- experiment runner (backs the CLI) ---- */

/* subcommand is one of: quantize, mfg, nplayer, pde, select, sweep.
 * config_json is the full experiment document; out_dir receives CSV output.
 * threads <= 1 disables concurrency. */
MFG_API int mfg_run_experiment(const char* subcommand, const char* config_json,
                               const char* out_dir, int threads);
/* Re-emits the fully defaulted configuration for a subcommand. */
MFG_API int mfg_dump_config(const char* subcommand, const char* config_json,
                            char* buf, size_t cap, size_t* written);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MFGLAB_H */
