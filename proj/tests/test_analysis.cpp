#include <doctest.h>

#include <cmath>
#include <random>

#include "analysis.hpp"
#include "common.hpp"
#include "equilibrium.hpp"

using namespace mfg;

namespace {

const double kSqrtTwoPiE = std::sqrt(2.0 * M_PI * M_E);

BoundInputs simple_inputs() {
  BoundInputs b;
  b.n_players = 1;
  b.d = 1;
  return b;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("log gamma agrees with the library evaluator") {
  for (double z : {0.5, 1.0, 1.5, 2.0, 3.75, 7.0, 10.5, 42.0, 500.25, 1001.0}) {
    const double ours = log_gamma_stirling(z);
    const double ref = std::lgamma(z);
    CHECK(std::abs(ours - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("noise-amplitude bound: direct substitutions") {
  BoundInputs b = simple_inputs();
  b.eps = 0.0;
  b.grad_integral = 3.0;
  CHECK(theorem_bound(b) == 0.0);

  b.eps = 0.1;
  b.t = 0.0;
  b.grad_integral = 1.0;
  CHECK(theorem_bound(b) == doctest::Approx(0.2).epsilon(1e-14));

  // Monotone in the noise amplitude, horizon and gradient integral.
  b.bound_dxb = 0.5;
  b.bound_b = 1.0;
  b.bound_hess_antideriv = 0.25;
  double prev = 0.0;
  for (double eps : {0.05, 0.1, 0.2}) {
    b.eps = eps;
    const double v = theorem_bound(b);
    CHECK(v >= prev);
    prev = v;
  }
  b.eps = 0.1;
  prev = 0.0;
  for (double t : {0.0, 0.5, 1.0}) {
    b.t = t;
    const double v = theorem_bound(b);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("size-uniform bound: closed form") {
  BoundInputs b = simple_inputs();
  b.eps = 0.0;
  b.uniform_bound = 1.0;
  b.radius = 1.0;
  CHECK(corollary_bound(b) == 0.0);

  b.eps = 1.0;
  b.t = 7.0;  // drops out when the Lipschitz constant vanishes
  CHECK(corollary_bound(b) ==
        doctest::Approx(1.0 + kSqrtTwoPiE).epsilon(1e-14));

  b.eps = 2.0;
  CHECK(corollary_bound(b) ==
        doctest::Approx(2.0 * (1.0 + kSqrtTwoPiE)).epsilon(1e-14));
}

TEST_CASE("gradient-integral bound: ball volumes") {
  CHECK(grad_integral_bound(1.0, 1, 1, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(grad_integral_bound(1.0, 2, 1, 1.0) ==
        doctest::Approx(std::sqrt(2.0) * M_PI).epsilon(1e-13));
  const double r1 = grad_integral_bound(1.0, 2, 1, 1.0);
  const double r2 = grad_integral_bound(1.0, 2, 1, 2.0);
  CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(1e-12));  // R^{nd} scaling
}

TEST_CASE("ball asymptotics reach the limiting constant") {
  CHECK(ball_asymptotic(1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(ball_asymptotic(2) ==
        doctest::Approx(std::sqrt(2.0) * std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(std::abs(ball_asymptotic(2000) - kSqrtTwoPiE) <= 1e-2);

  // A_n = sqrt(2 pi e) exp(-log(pi n)/(2n)) up to higher Stirling orders:
  // the sequence climbs to the limit from below (A_2 = 2.5066 < A_3 =
  // 2.7922 < ... < 4.1327).
  double prev = ball_asymptotic(2);
  for (int n = 3; n <= 10000; n = n < 100 ? n + 1 : n * 2) {
    const double cur = ball_asymptotic(n);
    CHECK(cur > prev);
    CHECK(cur < kSqrtTwoPiE);
    prev = cur;
  }
}

TEST_CASE("indicator seminorm closed form and finite-size sequence") {
  CHECK(seminorm_indicator(1.0, 1) == doctest::Approx(kSqrtTwoPiE).epsilon(1e-12));
  CHECK(seminorm_indicator(2.0, 1) ==
        doctest::Approx(2.0 * kSqrtTwoPiE).epsilon(1e-12));

  const auto seq = seminorm_indicator_sequence(1.0, 1, {10, 100, 2000});
  CHECK(std::abs(seq.back() - kSqrtTwoPiE) <= 1e-2);
  CHECK(std::abs(seq[1] - kSqrtTwoPiE) < std::abs(seq[0] - kSqrtTwoPiE));
}

TEST_CASE("entropy selection across the moving interface") {
  const Sigma0Model f = Sigma0Model::step_of_mean(0.0, 1.0, 0.0);
  const Grid grid = make_grid({{-2.0, 3.0, 500}});
  const SchemeConfig cfg{};
  const SelectionResult left = select_equilibrium(f, 0.25, 1.0, grid, cfg);
  CHECK(left.resolved);
  CHECK(left.value == doctest::Approx(1.0).epsilon(1e-9));
  const SelectionResult right = select_equilibrium(f, 0.75, 1.0, grid, cfg);
  CHECK(right.resolved);
  CHECK(right.value == doctest::Approx(0.0).epsilon(1e-9));

  // A query within two cells of the interface is reported unresolved.
  const SelectionResult close = select_equilibrium(f, 0.5, 1.0, grid, cfg);
  CHECK(!close.resolved);

  CHECK_THROWS_AS(select_equilibrium(f, -5.0, 1.0, grid, cfg), PreconditionError);
}

TEST_CASE("selection agrees with the unique root of a monotone coupling") {
  const Sigma0Model f = Sigma0Model::smooth_of_mean(
      [](double x) { return 0.6 * std::tanh(x); },
      [](double x) {
        const double c = std::cosh(x);
        return 0.6 / (c * c);
      },
      0.6, 0.6);
  const Grid grid = make_grid({{-4.0, 4.0, 800}});
  const double mean = 0.8, t = 1.0;
  const SelectionResult sel = select_equilibrium(f, mean, t, grid, SchemeConfig{});
  CHECK(sel.resolved);

  GameSpec spec{DriftModel::constant_in_x(-1.5, 1.5), f, t, FlowConfig{}, 64};
  const EquilibriumReport rep =
      find_equilibria(spec, Measure1D::dirac(mean), 2048, 1e-10);
  REQUIRE(rep.roots.size() == 1);
  CHECK(std::abs(sel.value - rep.roots[0].sigma) < 5e-3);
}

TEST_CASE("rate fits recover planted slopes") {
  std::vector<std::pair<double, double>> linear, quadratic, noisy;
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (double eps : {0.01, 0.02, 0.04, 0.08, 0.16}) {
    linear.emplace_back(eps, 3.0 * eps);
    quadratic.emplace_back(eps, 0.7 * eps * eps);
    noisy.emplace_back(eps, 2.0 * eps * (1.0 + jitter(rng)));
  }
  CHECK(fit_rate(linear).slope == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit_rate(quadratic).slope == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(fit_rate(noisy).slope - 1.0) <= 0.05);
  CHECK(fit_rate(linear).r_squared == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.2, 2.0}}), PreconditionError);
  CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.2, -2.0}, {0.4, 1.0}}),
                  PreconditionError);
}

}  // TEST_SUITE
