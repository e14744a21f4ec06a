#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "equilibrium.hpp"

using namespace mfg;

namespace {

GameSpec burgers_step_game(double t) {
  GameSpec spec{DriftModel::constant_in_x(-0.5, 1.5),
                Sigma0Model::step_of_mean(0.0, 1.0, 0.0), t, FlowConfig{}, 64};
  return spec;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("equilibrium map values for the step coupling") {
  const GameSpec spec = burgers_step_game(1.0);
  const Measure1D m = Measure1D::dirac(0.5);
  // Pushed mean 0.5 at sigma=0 sits right of the threshold, so the coupling
  // answers 0; at sigma=1 the mean is -0.5 and it answers 1.
  CHECK(f_value(spec, m, 0.0) == 0.0);
  CHECK(f_value(spec, m, 1.0) == 0.0);
  CHECK(f_value(spec, m, 0.25) == doctest::Approx(0.25));
}

TEST_CASE("constant coupling gives F(sigma) = sigma - c") {
  GameSpec spec = burgers_step_game(1.0);
  spec.sigma0 = Sigma0Model::step_of_mean(0.0, 0.7, 0.7);
  const Measure1D m = Measure1D::uniform(-1.0, 1.0);
  for (double s : {-0.3, 0.1, 1.2})
    CHECK(f_value(spec, m, s) == doctest::Approx(s - 0.7).epsilon(1e-12));
}

TEST_CASE("slope of the equilibrium map") {
  GameSpec spec = burgers_step_game(1.0);
  spec.sigma0 = Sigma0Model::smooth_of_mean(
      [](double x) { return std::tanh(x); },
      [](double x) {
        const double c = std::cosh(x);
        return 1.0 / (c * c);
      },
      1.0, 1.0);
  const Measure1D m = Measure1D::dirac(0.0);
  CHECK(f_prime(spec, m, 0.0) == doctest::Approx(2.0).epsilon(1e-9));

  // Constant coupling: slope exactly 1.
  GameSpec flat = spec;
  flat.sigma0 = Sigma0Model::smooth_of_mean([](double) { return 0.3; },
                                            [](double) { return 0.0; }, 0.3, 0.0);
  CHECK(f_prime(flat, m, 0.2) == doctest::Approx(1.0).epsilon(1e-12));

  // Finite-difference agreement over a grid.
  for (int i = 0; i < 20; ++i) {
    const double s = -0.45 + 0.09 * i;
    const double h = 1e-5;
    const double fd =
        (f_value(spec, m, s + h) - f_value(spec, m, s - h)) / (2.0 * h);
    CHECK(std::abs(f_prime(spec, m, s) - fd) < 1e-5);
  }
}

TEST_CASE("root scan finds both step equilibria exactly") {
  const GameSpec spec = burgers_step_game(1.0);
  const EquilibriumReport rep =
      find_equilibria(spec, Measure1D::dirac(0.5), 2048, 1e-10);
  REQUIRE(rep.roots.size() == 2);
  CHECK(rep.roots[0].sigma == 0.0);
  CHECK(rep.roots[1].sigma == 1.0);
  REQUIRE(rep.jump_crossings.size() == 1);
  CHECK(rep.jump_crossings[0] == doctest::Approx(0.5).epsilon(1e-3));

  const EquilibriumReport one =
      find_equilibria(spec, Measure1D::dirac(-1.0), 2048, 1e-10);
  REQUIRE(one.roots.size() == 1);
  CHECK(one.roots[0].sigma == 1.0);
}

TEST_CASE("monotone smooth coupling has a single stable root") {
  GameSpec spec = burgers_step_game(1.0);
  spec.sigma0 = Sigma0Model::smooth_of_mean(
      [](double x) { return std::tanh(x); },
      [](double x) {
        const double c = std::cosh(x);
        return 1.0 / (c * c);
      },
      1.0, 1.0);
  spec.drift = DriftModel::constant_in_x(-1.5, 1.5);
  for (const Measure1D& m :
       {Measure1D::dirac(0.3), Measure1D::uniform(-1.0, 0.2)}) {
    const EquilibriumReport rep = find_equilibria(spec, m, 1024, 1e-10);
    REQUIRE(rep.roots.size() == 1);
    CHECK(rep.jump_crossings.empty());
    CHECK(rep.roots[0].f_prime_estimate >= 1.0 - 1e-6);
    CHECK(std::abs(f_value(spec, m, rep.roots[0].sigma)) <= 1e-10);
    for (const auto& s : rep.samples) {
      // slope >= 1 everywhere along the scan
      (void)s;
    }
  }
}

TEST_CASE("verifier accepts constant patterns from the one-parameter root") {
  const GameSpec spec = burgers_step_game(1.0);
  // Mean 0.5 at distance 0.5 from the threshold: both constant answers lift.
  const Measure1D m = Measure1D::uniform(0.0, 1.0);
  for (int n = 4; n <= 64; n *= 2) {
    const std::vector<double> pts = quantize(m, n).points;
    for (double root : {0.0, 1.0}) {
      const NPlayerSolution sol =
          verify_nplayer(spec, pts, std::vector<double>(pts.size(), root));
      CHECK(sol.exact);
      CHECK(max_abs(sol.residuals) == 0.0);
    }
  }
}

TEST_CASE("two-point construction: unit data") {
  const ThreeEquilibria eq = construct_two_point_game(1.0, 1.0, 1.0, 10);
  CHECK(eq.split_index == 5);
  CHECK(eq.partial_sum_high == -1.0);
  CHECK(eq.partial_sum_low == 1.0);
  const GameSpec spec = burgers_step_game(1.0);
  for (const auto* pat : {&eq.pattern_low, &eq.pattern_high, &eq.pattern_mixed}) {
    const NPlayerSolution sol = verify_nplayer(spec, eq.points, *pat);
    CHECK(sol.exact);
  }
}

TEST_CASE("two-point construction: uneven data") {
  const ThreeEquilibria eq = construct_two_point_game(1.0, 2.0, 0.5, 12);
  CHECK(eq.split_index == 8);  // ceil(22/3)
  const GameSpec spec = burgers_step_game(0.5);
  // The mixed pattern is exact for every n by the ceiling choice; the two
  // constant patterns only hold once n is large enough. Here n = 12 is too
  // small for the all-high answer (the leave-one-out sum flips sign at
  // 8*1 - 4*2.5 + 2.5 = 0.5 >= 0), and n = 18 is the first even size where
  // all three verify.
  CHECK(verify_nplayer(spec, eq.points, eq.pattern_mixed).exact);
  CHECK(verify_nplayer(spec, eq.points, eq.pattern_low).exact);
  CHECK(!verify_nplayer(spec, eq.points, eq.pattern_high).exact);

  const ThreeEquilibria big = construct_two_point_game(1.0, 2.0, 0.5, 18);
  for (const auto* pat : {&big.pattern_low, &big.pattern_high, &big.pattern_mixed})
    CHECK(verify_nplayer(spec, big.points, *pat).exact);

  // Degenerate n = 2 still instantiates the formula.
  const ThreeEquilibria tiny = construct_two_point_game(1.0, 1.0, 1.0, 2);
  CHECK(tiny.split_index == 1);
}

TEST_CASE("the mixed pattern is one of the exhaustive step equilibria") {
  const ThreeEquilibria eq = construct_two_point_game(1.0, 1.0, 1.0, 10);
  const GameSpec spec = burgers_step_game(1.0);
  const auto patterns = enumerate_step_patterns(spec, eq.points);
  auto contains = [&](const std::vector<double>& pat) {
    return std::any_of(patterns.begin(), patterns.end(),
                       [&](const std::vector<double>& p) { return p == pat; });
  };
  CHECK(contains(eq.pattern_low));
  CHECK(contains(eq.pattern_high));
  CHECK(contains(eq.pattern_mixed));
}

TEST_CASE("mixed-pattern time-0 cloud converges to the split limit") {
  const double a = 1.0, b = 2.0, t = 0.5;
  const double lambda = b / (a + b);
  const Measure1D limit({{a, lambda}, {-b, 1.0 - lambda}}, {});
  double prev = 1e9;
  for (int n : {10, 40, 160}) {
    const ThreeEquilibria eq = construct_two_point_game(a, b, t, n);
    std::vector<double> time0(eq.points.size());
    for (size_t i = 0; i < eq.points.size(); ++i)
      time0[i] = eq.points[i] - eq.pattern_mixed[i] * t;
    const double d = w2_1d(Measure1D::point_set(time0), limit);
    CHECK(d < prev + 1e-6);
    prev = d;
    double mean = 0.0;
    for (double v : time0) mean += v;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean - 0.0) <= 2.0 / n);
    // Not a push-forward of the terminal cloud at either constant answer.
    for (double sigma : {0.0, 1.0}) {
      std::vector<double> pushed(eq.points.size());
      for (size_t i = 0; i < eq.points.size(); ++i)
        pushed[i] = eq.points[i] - sigma * t;
      const double gap =
          w2_1d(Measure1D::point_set(time0), Measure1D::point_set(pushed));
      CHECK(gap >= t / 2.0 * std::sqrt(std::min(lambda, 1.0 - lambda)));
    }
  }
  CHECK(prev < 0.05);
}

TEST_CASE("alternating construction closed forms") {
  const AlternatingConstruction alt = construct_alternating(1.0, 4, 0.5);
  CHECK(alt.magnitude == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(alt.coupling_unbounded);
  GameSpec spec{DriftModel::constant_in_x(-1.0, 1.0), alt.coupling, 1.0,
                FlowConfig{}, 64};
  const NPlayerSolution sol = verify_nplayer(spec, alt.points, alt.pattern);
  CHECK(max_abs(sol.residuals) <= 1e-12);

  CHECK(construct_alternating(1.0, 4, 2.0).magnitude ==
        doctest::Approx(3.0).epsilon(1e-13));
  // Magnitudes shrink like (n-1)^(-2) for the square-root response.
  const double m8 = construct_alternating(1.0, 8, 0.5).magnitude;
  CHECK(m8 == doctest::Approx(1.0 / 49.0).epsilon(1e-12));
  CHECK_THROWS_AS(construct_alternating(1.0, 4, 1.0), PreconditionError);
  CHECK_THROWS_AS(construct_alternating(1.0, 5, 0.5), PreconditionError);
}

TEST_CASE("two-population construction on point masses") {
  const DriftModel drift = DriftModel::constant_in_x(-0.5, 1.5);
  const Measure1D mu = Measure1D::dirac(-1.0);
  const Measure1D nu = Measure1D::dirac(1.0);
  const auto ten = construct_two_population(drift, mu, nu, 1.0, 10);
  REQUIRE(ten.has_value());
  CHECK(ten->split_index == 5);
  CHECK(ten->lambda == doctest::Approx(0.5));
  CHECK(ten->mean_gap == doctest::Approx(2.0));
  const GameSpec spec = burgers_step_game(1.0);
  for (const auto* pat : {&ten->pattern_low, &ten->pattern_high, &ten->pattern_mixed})
    CHECK(verify_nplayer(spec, ten->points, *pat).exact);

  // n = 11 trips the rounding condition: ceil(5.5) - 5.5 = 0.5 >= c/delta.
  CHECK(!construct_two_population(drift, mu, nu, 1.0, 11).has_value());
}

TEST_CASE("two-population construction on uniform populations") {
  const DriftModel drift = DriftModel::constant_in_x(-0.5, 1.5);
  const Measure1D mu = Measure1D::uniform(-2.0, -1.0);
  const Measure1D nu = Measure1D::uniform(1.0, 2.0);
  const auto eight = construct_two_population(drift, mu, nu, 0.25, 8);
  REQUIRE(eight.has_value());
  CHECK(eight->lambda == doctest::Approx(0.5));
  CHECK(eight->time0_sum >= 0.0);
  CHECK(eight->time0_sum < eight->support_gap);
  const GameSpec spec = burgers_step_game(0.25);
  CHECK(verify_nplayer(spec, eight->points, eight->pattern_mixed).exact);

  // Precondition screens: wrong support sides are refused.
  CHECK_THROWS_AS(construct_two_population(drift, nu, mu, 0.25, 8),
                  PreconditionError);
}

TEST_CASE("damped best responses find the unique smooth equilibrium") {
  GameSpec spec = burgers_step_game(1.0);
  spec.drift = DriftModel::constant_in_x(-1.5, 1.5);
  spec.sigma0 = Sigma0Model::smooth_of_mean(
      [](double x) { return 0.8 * std::tanh(x); },
      [](double x) {
        const double c = std::cosh(x);
        return 0.8 / (c * c);
      },
      0.8, 0.8);
  const std::vector<double> pts{-0.2, 0.1, 0.4, 0.7};
  const auto sols = nplayer_fixed_points(spec, pts);
  REQUIRE(sols.size() == 1);
  const NPlayerSolution chk = verify_nplayer(spec, pts, sols[0]);
  CHECK(max_abs(chk.residuals) < 1e-9);
}

}  // TEST_SUITE
