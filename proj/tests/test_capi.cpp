#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mfglab/mfglab.h"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("measure lifecycle and quantization through the C surface") {
  mfg_measure* m = nullptr;
  REQUIRE(mfg_measure_parse_json("{\"atoms\":[],\"pieces\":[[0.0,1.0,1.0]]}", &m) ==
          MFG_OK);
  double cdf = 0.0;
  CHECK(mfg_measure_cdf(m, 0.25, &cdf) == MFG_OK);
  CHECK(cdf == doctest::Approx(0.25));

  double pts[3] = {0, 0, 0};
  double w2 = 0.0;
  REQUIRE(mfg_measure_quantize(m, 3, pts, &w2) == MFG_OK);
  CHECK(pts[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(w2 * w2 == doctest::Approx(1.0 / 108.0).epsilon(1e-12));

  char buf[256];
  size_t written = 0;
  REQUIRE(mfg_measure_to_json(m, buf, sizeof buf, &written) == MFG_OK);
  CHECK(std::strncmp(buf, "{\"atoms\":", 9) == 0);

  mfg_measure* d3 = nullptr;
  REQUIRE(mfg_measure_dirac(3.0, &d3) == MFG_OK);
  mfg_measure* d0 = nullptr;
  REQUIRE(mfg_measure_dirac(0.0, &d0) == MFG_OK);
  double dist = 0.0;
  CHECK(mfg_measure_w2(d0, d3, &dist) == MFG_OK);
  CHECK(dist == doctest::Approx(3.0));
  mfg_measure_free(d0);
  mfg_measure_free(d3);
  mfg_measure_free(m);
}

TEST_CASE("configuration errors surface as status codes with messages") {
  mfg_measure* m = nullptr;
  CHECK(mfg_measure_parse_json("{\"atoms\":[[0.0,0.4]]}", &m) == MFG_ERR_CONFIG);
  CHECK(std::string(mfg_last_error_message()).find("mass") != std::string::npos);
  CHECK(mfg_measure_parse_json(nullptr, &m) == MFG_ERR_INVALID);
}

TEST_CASE("flows and equilibria through the C surface") {
  mfg_drift* d = nullptr;
  REQUIRE(mfg_drift_constant_in_x(-0.5, 1.5, &d) == MFG_OK);
  const double x = 5.0;
  double y = 0.0;
  REQUIRE(mfg_drift_flow_backward(d, 2.0, 1.0, &x, 1, 0, &y) == MFG_OK);
  CHECK(y == doctest::Approx(3.0));

  mfg_sigma0* s = nullptr;
  REQUIRE(mfg_sigma0_step_of_mean(0.0, 1.0, 0.0, &s) == MFG_OK);
  mfg_measure* m = nullptr;
  REQUIRE(mfg_measure_dirac(0.5, &m) == MFG_OK);

  double roots[8], jumps[8];
  size_t nroots = 0, njumps = 0;
  REQUIRE(mfg_find_equilibria(d, s, m, 1.0, 2048, 1e-10, roots, 8, &nroots,
                              jumps, 8, &njumps) == MFG_OK);
  REQUIRE(nroots == 2);
  CHECK(roots[0] == 0.0);
  CHECK(roots[1] == 1.0);
  REQUIRE(njumps == 1);

  double points[10], mixed[10], residuals[10];
  int split = 0, exact = 0;
  REQUIRE(mfg_construct_threshold_game(1.0, 1.0, 1.0, 10, points, mixed,
                                       &split) == MFG_OK);
  CHECK(split == 5);
  REQUIRE(mfg_verify_nplayer(d, s, 1.0, points, mixed, 10, 0, residuals,
                             &exact) == MFG_OK);
  CHECK(exact == 1);

  mfg_measure_free(m);
  mfg_sigma0_free(s);
  mfg_drift_free(d);
}

TEST_CASE("transport run and bound evaluators through the C surface") {
  mfg_drift* d = nullptr;
  REQUIRE(mfg_drift_constant_in_x(-0.5, 1.5, &d) == MFG_OK);
  mfg_sigma0* s = nullptr;
  REQUIRE(mfg_sigma0_step_of_mean(0.0, 1.0, 0.0, &s) == MFG_OK);

  const double lo = -2.0, hi = 3.0;
  const int cells = 200;
  mfg_state* entropy = nullptr;
  REQUIRE(mfg_pde_run(d, s, 1, &lo, &hi, &cells, 1, 0.45, 0.0, 1.0, &entropy) ==
          MFG_OK);
  mfg_state* viscous = nullptr;
  REQUIRE(mfg_pde_run(d, s, 1, &lo, &hi, &cells, 1, 0.45, 0.005, 1.0,
                      &viscous) == MFG_OK);
  double err = 0.0;
  REQUIRE(mfg_state_l1_distance(entropy, viscous, &err) == MFG_OK);
  CHECK(err > 0.0);
  double tv = 0.0;
  REQUIRE(mfg_state_total_variation(entropy, &tv) == MFG_OK);
  CHECK(tv == doctest::Approx(1.0).epsilon(1e-10));
  double bound = 0.0;
  REQUIRE(mfg_theorem_bound(1, 1, 1.0, 0.1, 1.0, 0.0, 0.0, tv, &bound) == MFG_OK);
  CHECK(err <= bound);
  mfg_state_free(entropy);
  mfg_state_free(viscous);

  double a2000 = 0.0;
  REQUIRE(mfg_ball_asymptotic(2000, &a2000) == MFG_OK);
  CHECK(std::abs(a2000 - std::sqrt(2.0 * M_PI * M_E)) <= 1e-2);

  double value = 0.0;
  int resolved = 0;
  REQUIRE(mfg_select_equilibrium(s, 0.25, 1.0, -2.0, 3.0, 500, 0.45, 0.0,
                                 &value, &resolved) == MFG_OK);
  CHECK(resolved == 1);
  CHECK(value == doctest::Approx(1.0).epsilon(1e-9));

  mfg_sigma0_free(s);
  mfg_drift_free(d);
}

TEST_CASE("experiment runner writes files and dumps defaulted configs") {
  const std::filesystem::path dir = "capi_experiment_out";
  std::filesystem::remove_all(dir);
  const char* config =
      "{\"measure\":{\"atoms\":[],\"pieces\":[[0.0,1.0,1.0]]},\"n\":3}";
  REQUIRE(mfg_run_experiment("quantize", config, dir.string().c_str(), 1) ==
          MFG_OK);
  const std::string points = slurp(dir / "quantize_points.csv");
  CHECK(points.find("1.666666666667e-01") != std::string::npos);

  size_t needed = 0;
  mfg_dump_config("quantize", config, nullptr, 0, &needed);
  std::vector<char> buf(needed);
  REQUIRE(mfg_dump_config("quantize", config, buf.data(), buf.size(), &needed) ==
          MFG_OK);
  CHECK(std::string(buf.data()).find("\"n\": 3") != std::string::npos);

  CHECK(mfg_run_experiment("quantize", "{\"n\":3}", dir.string().c_str(), 1) ==
        MFG_ERR_CONFIG);
  CHECK(mfg_run_experiment("bogus", config, dir.string().c_str(), 1) ==
        MFG_ERR_CONFIG);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
