#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MFGLAB_CLI_PATH) + " " + args;
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("identical configs produce byte-identical output") {
  const fs::path dir = "cli_out";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "q.json",
             "{\"measure\":{\"atoms\":[],\"pieces\":[[0.0,1.0,1.0]]},\"n\":5}");
  REQUIRE(run_cli("quantize --config " + (dir / "q.json").string() + " --out " +
                  (dir / "a").string()) == 0);
  REQUIRE(run_cli("quantize --config " + (dir / "q.json").string() + " --out " +
                  (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "quantize_points.csv") ==
        slurp(dir / "b" / "quantize_points.csv"));
  CHECK(slurp(dir / "a" / "partition.csv") == slurp(dir / "b" / "partition.csv"));
  // LF endings, header first.
  const std::string text = slurp(dir / "a" / "quantize_points.csv");
  CHECK(text.rfind("j,point\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("dump-config round trips to the same fully defaulted document") {
  const fs::path dir = "cli_dump";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "m.json",
             "{\"game\":{\"drift\":{\"variant\":\"constant_in_x\"},"
             "\"sigma0\":{\"variant\":\"step_of_mean\"}},"
             "\"measure\":{\"atoms\":[[0.5,1.0]],\"pieces\":[]}}");
  REQUIRE(run_cli("mfg --config " + (dir / "m.json").string() +
                  " --dump-config > " + (dir / "full.json").string()) == 0);
  const std::string full = slurp(dir / "full.json");
  CHECK(full.find("\"grid_points\": 2048") != std::string::npos);
  CHECK(full.find("\"quantization_points\": 64") != std::string::npos);

  // The dumped document reproduces the run.
  REQUIRE(run_cli("mfg --config " + (dir / "full.json").string() + " --out " +
                  (dir / "a").string()) == 0);
  REQUIRE(run_cli("mfg --config " + (dir / "m.json").string() + " --out " +
                  (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "equilibria.csv") == slurp(dir / "b" / "equilibria.csv"));
  fs::remove_all(dir);
}

TEST_CASE("exit codes distinguish config errors from refusals") {
  const fs::path dir = "cli_err";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "bad.json", "{\"measure\":{},\"n\":3,\"zzz\":1}");
  CHECK(run_cli("quantize --config " + (dir / "bad.json").string() + " --out " +
                (dir / "o").string() + " 2>/dev/null") == 2);
  CHECK(run_cli("quantize --config " + (dir / "missing.json").string() +
                " 2>/dev/null") == 2);
  write_file(dir / "refuse.json",
             "{\"sigma0\":{\"variant\":\"step_of_mean\"},\"mean\":-99.0,"
             "\"grid\":{\"axes\":[{\"min\":-2.0,\"max\":3.0,\"cells\":100}]}}");
  CHECK(run_cli("select --config " + (dir / "refuse.json").string() + " --out " +
                (dir / "o").string() + " 2>/dev/null") == 4);
  CHECK(run_cli("bogus --config " + (dir / "bad.json").string() +
                " 2>/dev/null") == 2);
  fs::remove_all(dir);
}

TEST_CASE("sweep orders rows by epsilon regardless of thread count") {
  const fs::path dir = "cli_sweep";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "s.json",
             "{\"drift\":{\"variant\":\"constant_in_x\",\"sigma_range\":[-0.5,1.5]},"
             "\"initial_sigma0\":{\"variant\":\"step_of_mean\"},"
             "\"grid\":{\"axes\":[{\"min\":-2.0,\"max\":3.0,\"cells\":100}]},"
             "\"t_end\":0.5,"
             "\"epsilons\":[0.16,0.04,0.08]}");
  REQUIRE(run_cli("sweep --config " + (dir / "s.json").string() + " --out " +
                  (dir / "a").string() + " --threads 1") == 0);
  REQUIRE(run_cli("sweep --config " + (dir / "s.json").string() + " --out " +
                  (dir / "b").string() + " --threads 3") == 0);
  const std::string a = slurp(dir / "a" / "sweep.csv");
  CHECK(a == slurp(dir / "b" / "sweep.csv"));
  CHECK(a.find("4.000000000000e-02") < a.find("8.000000000000e-02"));
  fs::remove_all(dir);
}

}  // TEST_SUITE
