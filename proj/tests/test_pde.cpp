#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "analysis.hpp"
#include "pde.hpp"

using namespace mfg;

namespace {

DriftModel burgers() { return DriftModel::constant_in_x(-0.5, 1.5); }

Sigma0Model step10() { return Sigma0Model::step_of_mean(0.0, 1.0, 0.0); }
Sigma0Model step01() { return Sigma0Model::step_of_mean(0.0, 0.0, 1.0); }

GridState riemann_state(const Sigma0Model& s0, int cells) {
  return initial_from_sigma0(s0, make_grid({{-2.0, 3.0, cells}}), 1, 1);
}

// Entropy solution of the u^2/2 law with decreasing unit step data: a shock
// travelling at speed 1/2.
double shock_exact(double x, double t) { return x < 0.5 * t ? 1.0 : 0.0; }

// Increasing step data: the centered expansion fan.
double fan_exact(double x, double t) {
  if (x <= 0.0) return 0.0;
  if (x >= t) return 1.0;
  return x / t;
}

double l1_against(const GridState& s, double (*exact)(double, double)) {
  const GridAxis& ax = s.grid.axes[0];
  double acc = 0.0;
  for (int i = 0; i < ax.cells; ++i)
    acc += std::abs(s.u[static_cast<size_t>(i)] - exact(ax.center(i), s.t));
  return acc * ax.dx();
}

double crossing_location(const GridState& s, double level) {
  const GridAxis& ax = s.grid.axes[0];
  for (int i = 0; i + 1 < ax.cells; ++i) {
    const double a = s.u[static_cast<size_t>(i)], b = s.u[static_cast<size_t>(i + 1)];
    if (a >= level && b < level)
      return ax.center(i) + (a - level) / (a - b) * ax.dx();
  }
  return ax.lo;
}

GridState smooth_state(int cells, double lo, double hi) {
  GridState st;
  st.grid = make_grid({{lo, hi, cells}});
  st.t = 0.0;
  st.u.resize(st.grid.size());
  for (int i = 0; i < cells; ++i) {
    const double x = st.grid.axes[0].center(i);
    st.u[static_cast<size_t>(i)] = 0.5 + 0.5 * std::tanh(2.0 * x);
  }
  return st;
}

}  // namespace

TEST_SUITE("pde") {

TEST_CASE("constants are exact steady states for every model") {
  for (const DriftModel& m :
       {burgers(), DriftModel::linear_quadratic(1.0, -1.5, 1.5, -4.0, 4.0, 2.0)}) {
    GridState st;
    st.grid = make_grid({{-2.0, 2.0, 64}});
    st.u.assign(st.grid.size(), 0.7);
    const GridState out = run(st, m, SchemeConfig{}, 0.5);
    for (double v : out.u) CHECK(std::abs(v - 0.7) <= 1e-14);
  }
}

TEST_CASE("constants are exact steady states in dimension two") {
  const DriftModel m = DriftModel::linear_quadratic(0.5, -1.5, 1.5, -4.0, 4.0, 2.0);
  GridState st;
  st.grid = make_grid({{-2.0, 2.0, 24}, {-2.0, 2.0, 24}});
  st.u.assign(st.grid.size(), 0.4);
  const GridState out = run(st, m, SchemeConfig{}, 0.3);
  for (double v : out.u) CHECK(std::abs(v - 0.4) <= 1e-14);
}

TEST_CASE("decreasing step data sharpens into the travelling shock") {
  const GridState init = riemann_state(step10(), 400);
  const GridState out = run(init, burgers(), SchemeConfig{}, 1.0);
  const double dx = init.grid.axes[0].dx();
  CHECK(std::abs(crossing_location(out, 0.5) - 0.5) <= 2.0 * dx);
}

TEST_CASE("increasing step data spreads into the expansion fan") {
  const GridState init = riemann_state(step01(), 400);
  const GridState out = run(init, burgers(), SchemeConfig{}, 1.0);
  const double dx = init.grid.axes[0].dx();
  CHECK(l1_against(out, fan_exact) <= 5.0 * std::pow(dx, 0.7) * 5.0);
}

TEST_CASE("vanishing viscosity is continuous at zero") {
  const GridState init = smooth_state(200, -3.0, 3.0);
  const GridState a = run(init, burgers(), SchemeConfig{0.45, 0.0, false}, 0.2);
  const GridState b = run(init, burgers(), SchemeConfig{0.45, 1e-6, false}, 0.2);
  CHECK(l1_distance(a, b) <= 1e-3);
}

TEST_CASE("zero-length run returns the initial state") {
  const GridState init = riemann_state(step10(), 64);
  const GridState out = run(init, burgers(), SchemeConfig{}, 0.0);
  CHECK(out.t == 0.0);
  CHECK(out.u == init.u);
}

TEST_CASE("smooth monotone data under the affine drift keeps its range") {
  const DriftModel m = DriftModel::linear_quadratic(0.5, -1.5, 1.5, -4.0, 4.0, 1.0);
  const GridState init = smooth_state(200, -3.0, 3.0);
  double mn0, mx0;
  state_minmax(init, mn0, mx0);
  bool ok = true;
  run(init, m, SchemeConfig{}, 0.5, [&](const GridState& s) {
    double mn, mx;
    state_minmax(s, mn, mx);
    ok = ok && mn >= mn0 - 1e-12 && mx <= mx0 + 1e-12;
  });
  CHECK(ok);
}

TEST_CASE("initial data evaluates the coupling on cell centers") {
  const Grid g1 = make_grid({{-1.0, 1.0, 10}});
  const GridState a = initial_from_sigma0(step10(), g1, 1, 1);
  for (int i = 0; i < 10; ++i)
    CHECK(a.u[static_cast<size_t>(i)] == (g1.axes[0].center(i) < 0.0 ? 1.0 : 0.0));

  const Grid g2 = make_grid({{-1.0, 1.0, 8}, {-1.0, 1.0, 8}});
  const GridState b = initial_from_sigma0(step10(), g2, 2, 1);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const double mean = 0.5 * (g2.axes[0].center(i) + g2.axes[1].center(j));
      CHECK(b.u[static_cast<size_t>(i * 8 + j)] == (mean < 0.0 ? 1.0 : 0.0));
    }

  Sigma0Model smooth = Sigma0Model::smooth_of_mean(
      [](double x) { return std::tanh(x); },
      [](double x) {
        const double c = std::cosh(x);
        return 1.0 / (c * c);
      },
      1.0, 1.0);
  smooth.cutoff_radius = 3.0;
  const GridState c = initial_from_sigma0(smooth, make_grid({{-5.0, 5.0, 40}}), 1, 1);
  for (int i = 0; i < 40; ++i) {
    const double x = c.grid.axes[0].center(i);
    const double expected = std::tanh(x) * smooth.bump(x * x);
    CHECK(c.u[static_cast<size_t>(i)] == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK_THROWS_AS(initial_from_sigma0(step10(), g2, 1, 1), PreconditionError);
}

TEST_CASE("l1 distance against a fine quadrature of smooth functions") {
  const int cells = 4000;
  GridState a, b;
  a.grid = b.grid = make_grid({{0.0, 1.0, cells}});
  a.u.resize(a.grid.size());
  b.u.resize(b.grid.size());
  for (int i = 0; i < cells; ++i) {
    const double x = a.grid.axes[0].center(i);
    a.u[static_cast<size_t>(i)] = std::sin(x);
    b.u[static_cast<size_t>(i)] = -1.5 + 0.1 * x;  // stays below sin on [0,1]
  }
  CHECK(l1_distance(a, a) == 0.0);
  // Fine-grid midpoint quadrature of the (smooth, single-signed) difference.
  double ref = 0.0;
  const int fine = 400000;
  for (int i = 0; i < fine; ++i) {
    const double x = (i + 0.5) / fine;
    ref += std::abs(std::sin(x) - (-1.5 + 0.1 * x));
  }
  ref /= fine;
  CHECK(std::abs(l1_distance(a, b) - ref) < 1e-8);

  GridState shifted = a;
  shifted.grid = make_grid({{0.0, 1.0, cells / 2}});
  shifted.u.resize(shifted.grid.size());
  CHECK_THROWS_AS(l1_distance(a, shifted), PreconditionError);
}

TEST_CASE("indicator shift distance equals the shift") {
  const int cells = 500;
  GridState a, b;
  a.grid = b.grid = make_grid({{-2.0, 3.0, cells}});
  a.u.resize(a.grid.size());
  b.u.resize(b.grid.size());
  const double h = 0.25;
  for (int i = 0; i < cells; ++i) {
    const double x = a.grid.axes[0].center(i);
    a.u[static_cast<size_t>(i)] = x < 0.0 ? 1.0 : 0.0;
    b.u[static_cast<size_t>(i)] = x < h ? 1.0 : 0.0;
  }
  CHECK(std::abs(l1_distance(a, b) - h) <= a.grid.axes[0].dx());
}

TEST_CASE("total variation of canonical profiles") {
  GridState st;
  st.grid = make_grid({{-5.0, 5.0, 400}});
  st.u.resize(st.grid.size());
  for (int i = 0; i < 400; ++i)
    st.u[static_cast<size_t>(i)] = st.grid.axes[0].center(i) < 0.0 ? 0.0 : 1.0;
  CHECK(total_variation(st) == doctest::Approx(1.0).epsilon(1e-14));

  st.u.assign(st.grid.size(), 0.3);
  CHECK(total_variation(st) == 0.0);

  for (int i = 0; i < 400; ++i)
    st.u[static_cast<size_t>(i)] = std::tanh(st.grid.axes[0].center(i));
  CHECK(total_variation(st) == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("entropy residual of the captured shock stays admissible") {
  const GridState init = riemann_state(step10(), 200);
  const auto snaps = run_recorded(init, burgers(), SchemeConfig{}, 1.0);
  const double dx = init.grid.axes[0].dx();
  for (double k : {0.25, 0.5, 0.75})
    CHECK(entropy_residual(snaps, burgers(), k) >= -5.0 * dx);
}

TEST_CASE("entropy residual vanishes on constants for x-dependent fluxes") {
  const DriftModel m = DriftModel::linear_quadratic(1.0, -1.5, 1.5, -4.0, 4.0, 1.0);
  GridState st;
  st.grid = make_grid({{-2.0, 2.0, 100}});
  st.u.assign(st.grid.size(), 0.6);
  const auto snaps = run_recorded(st, m, SchemeConfig{}, 0.25);
  for (double k : {-0.5, 0.3, 0.9})
    CHECK(std::abs(entropy_residual(snaps, m, k)) <= 1e-12);
}

TEST_CASE("an imposed expansion shock is repaired by the scheme") {
  // Non-entropic initial profile: the increasing jump would stay a steady
  // shock for a non-dissipative method; here it opens into the fan.
  const GridState init = riemann_state(step01(), 200);
  const auto snaps = run_recorded(init, burgers(), SchemeConfig{}, 1.0);
  const double dx = init.grid.axes[0].dx();
  for (double k : {0.25, 0.5, 0.75})
    CHECK(entropy_residual(snaps, burgers(), k) >= -5.0 * dx);
  CHECK(l1_against(snaps.back(), fan_exact) < 0.1);
}

TEST_CASE("shock error halves under grid refinement") {
  const GridState c200 = run(riemann_state(step10(), 200), burgers(), SchemeConfig{}, 1.0);
  const GridState c400 = run(riemann_state(step10(), 400), burgers(), SchemeConfig{}, 1.0);
  const double e200 = l1_against(c200, shock_exact);
  const double e400 = l1_against(c400, shock_exact);
  CHECK(e200 / e400 >= 1.7);
}

TEST_CASE("max principle along randomized runs") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> mid(-0.5, 0.5), amp(0.2, 0.9);
  for (int trial = 0; trial < 5; ++trial) {
    const bool use_lq = trial % 2 == 1;
    const DriftModel m = use_lq
                             ? DriftModel::linear_quadratic(0.8, -1.5, 1.5, -4.0, 4.0, 1.0)
                             : burgers();
    GridState st;
    st.grid = make_grid({{-2.5, 2.5, 150}});
    st.u.resize(st.grid.size());
    const double a = amp(rng), c = mid(rng);
    const bool step_data = trial % 3 == 0;
    for (int i = 0; i < 150; ++i) {
      const double x = st.grid.axes[0].center(i);
      st.u[static_cast<size_t>(i)] =
          step_data ? (x < c ? a : 0.0) : a * 0.5 * (1.0 + std::tanh(2.0 * (x - c)));
    }
    double mn0, mx0;
    state_minmax(st, mn0, mx0);
    const double nu = trial % 2 == 0 ? 0.0 : 1e-4;
    bool ok = true;
    run(st, m, SchemeConfig{0.45, nu, false}, 0.4, [&](const GridState& s) {
      double mn, mx;
      state_minmax(s, mn, mx);
      ok = ok && mn >= mn0 - 1e-10 && mx <= mx0 + 1e-10;
    });
    CHECK(ok);
  }
}

TEST_CASE("variation growth stays under the exponential envelope") {
  const double lb = 0.8;
  const DriftModel m = DriftModel::linear_quadratic(lb, -1.5, 1.5, -4.0, 4.0, 1.0);
  const GridState init = smooth_state(200, -3.0, 3.0);
  const double tv0 = total_variation(init);
  bool ok = true;
  run(init, m, SchemeConfig{}, 0.6, [&](const GridState& s) {
    ok = ok && total_variation(s) <=
                   std::exp(2.0 * lb * s.t) * tv0 * (1.0 + 1e-6);
  });
  CHECK(ok);
}

TEST_CASE("x-independent flux contracts distances between ordered runs") {
  GridState a, b;
  a.grid = b.grid = make_grid({{-3.0, 3.0, 160}});
  a.u.resize(a.grid.size());
  b.u.resize(b.grid.size());
  for (int i = 0; i < 160; ++i) {
    const double x = a.grid.axes[0].center(i);
    a.u[static_cast<size_t>(i)] = 0.5 + 0.4 * std::tanh(2.0 * x);
    b.u[static_cast<size_t>(i)] = 0.6 + 0.4 * std::tanh(2.0 * x);  // ordered above a
  }
  const SchemeConfig cfg{};
  GridState ca = a, cb = b;
  double prev = l1_distance(ca, cb);
  for (int s = 0; s < 60; ++s) {
    const double dt = std::min(stable_dt(ca, burgers(), cfg), 0.45 * a.grid.axes[0].dx());
    step_by(ca, burgers(), cfg, dt);
    step_by(cb, burgers(), cfg, dt);
    const double cur = l1_distance(ca, cb);
    CHECK(cur <= prev + 1e-10);
    prev = cur;
  }
}

TEST_CASE("compact deviation from a constant conserves the integral") {
  GridState st;
  st.grid = make_grid({{-3.0, 3.0, 160}});
  st.u.resize(st.grid.size());
  for (int i = 0; i < 160; ++i) {
    const double x = st.grid.axes[0].center(i);
    st.u[static_cast<size_t>(i)] = 0.3 + 0.4 * std::exp(-4.0 * x * x);
  }
  const double mass0 = mass_integral(st);
  const GridState out = run(st, burgers(), SchemeConfig{}, 0.6);
  CHECK(std::abs(mass_integral(out) - mass0) <= 1e-10);
}

TEST_CASE("binary state dump round trips") {
  const GridState init = riemann_state(step10(), 64);
  const std::string path = "test_state_dump.bin";
  write_state_binary(init, path);
  const GridState back = read_state_binary(path, init.grid);
  CHECK(back.t == init.t);
  CHECK(back.u == init.u);
  std::remove(path.c_str());
}

TEST_CASE("quiet boundary margin sees the constant run-in") {
  const GridState init = riemann_state(step10(), 100);
  CHECK(quiet_boundary_margin(init) >= 5);
}

TEST_CASE("non-finite states abort with a diagnostic") {
  GridState st;
  st.grid = make_grid({{-1.0, 1.0, 16}});
  st.u.assign(st.grid.size(), 0.5);
  st.u[8] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step_by(st, burgers(), SchemeConfig{}, 1e-3), NumericalError);
}

}  // TEST_SUITE
