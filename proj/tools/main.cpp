// mfglab command-line runner. Thin shell over the shared-library C API:
// parses arguments, loads the config document, dispatches, maps status codes
// to exit codes (0 ok, 2 config, 3 numerical, 4 refused precondition).

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mfglab/mfglab.h"

namespace {

const char* kUsage =
    "usage: mfglab <subcommand> --config <path> [--out <dir>] [--threads <n>]\n"
    "              [--dump-config]\n"
    "\n"
    "subcommands:\n"
    "  quantize   equal-mass partition and optimal point approximation\n"
    "  mfg        scan the equilibrium map and report roots and jumps\n"
    "  nplayer    build or verify n-player equilibrium constructions\n"
    "  pde        entropy or viscous transport run with diagnostics\n"
    "  select     entropy-selected equilibrium plus the full root set\n"
    "  sweep      viscous-vs-entropy error sweep with bound evaluation\n"
    "\n"
    "--dump-config prints the fully defaulted configuration and exits.\n";

bool read_file(const std::string& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  *out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fputs(kUsage, stderr);
    return 2;
  }
  const std::string subcommand = argv[1];
  if (subcommand == "--help" || subcommand == "-h" || subcommand == "help") {
    std::fputs(kUsage, stdout);
    return 0;
  }

  std::string config_path, out_dir = ".";
  int threads = 1;
  bool dump = false;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&](const char* what) -> const char* {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "mfglab: %s expects a value\n", what);
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--config") {
      config_path = next("--config");
    } else if (arg == "--out") {
      out_dir = next("--out");
    } else if (arg == "--threads") {
      threads = std::atoi(next("--threads"));
      if (threads < 1) {
        std::fprintf(stderr, "mfglab: --threads expects a positive integer\n");
        return 2;
      }
    } else if (arg == "--dump-config") {
      dump = true;
    } else {
      std::fprintf(stderr, "mfglab: unknown option '%s'\n%s", arg.c_str(), kUsage);
      return 2;
    }
  }
  if (config_path.empty()) {
    std::fprintf(stderr, "mfglab: --config is required\n");
    return 2;
  }
  std::string config;
  if (!read_file(config_path, &config)) {
    std::fprintf(stderr, "mfglab: cannot read config '%s'\n", config_path.c_str());
    return 2;
  }

  if (dump) {
    size_t needed = 0;
    mfg_dump_config(subcommand.c_str(), config.c_str(), nullptr, 0, &needed);
    std::vector<char> buf(needed > 0 ? needed : 1);
    const int rc = mfg_dump_config(subcommand.c_str(), config.c_str(),
                                   buf.data(), buf.size(), &needed);
    if (rc != MFG_OK) {
      std::fprintf(stderr, "mfglab: %s\n", mfg_last_error_message());
      return rc;
    }
    std::fputs(buf.data(), stdout);
    return 0;
  }

  const int rc = mfg_run_experiment(subcommand.c_str(), config.c_str(),
                                    out_dir.c_str(), threads);
  if (rc != MFG_OK) {
    std::fprintf(stderr, "mfglab: %s\n", mfg_last_error_message());
    return rc;
  }
  return 0;
}
