#pragma once

#include <string>

namespace mfg {

// Runs one experiment subcommand (quantize, mfg, nplayer, pde, select,
// sweep) from a JSON configuration document, writing CSV results into
// out_dir. threads > 1 allows concurrent sweep entries; output order is
// independent of scheduling. Throws ConfigError / PreconditionError /
// NumericalError on the corresponding failures.
void run_experiment(const std::string& subcommand, const std::string& config,
                    const std::string& out_dir, int threads);

// Returns the fully defaulted configuration document that reproduces the
// run, with every numeric default made explicit.
std::string dump_config(const std::string& subcommand,
                        const std::string& config);

}  // namespace mfg
