#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace mfg {

// Error taxonomy. The codes double as CLI exit codes: config 2, numerical 3,
// refused precondition 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

// Recursive adaptive Simpson quadrature. Integrands here are piecewise smooth
// (positive/negative parts of a drift), so plain bisection refinement is
// enough.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);

// log Gamma(z) for z > 0 by an 8-term Stirling series with argument-shift
// recursion below z = 10. Relative error under 1e-13 on the tested range;
// kept local so ball-volume computations have a self-contained evaluator that
// tests can cross-check against std::lgamma.
double log_gamma_stirling(double z);

}  // namespace mfg
