#include "common.hpp"

#include <array>

namespace mfg {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double fm, double whole,
                     double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, fm, whole, tol, 48);
}

double log_gamma_stirling(double z) {
  require(z > 0.0 && std::isfinite(z), "log_gamma requires finite z > 0");
  // Shift small arguments up: lgamma(z) = lgamma(z + k) - sum log(z + i).
  double shift = 0.0;
  while (z < 10.0) {
    shift += std::log(z);
    z += 1.0;
  }
  // Stirling: lgamma(z) ~ (z - 1/2) log z - z + log(2 pi)/2 + sum B_2k /
  // (2k(2k-1) z^{2k-1}), eight correction terms.
  static const std::array<double, 8> coeff = {
      1.0 / 12.0,           -1.0 / 360.0,          1.0 / 1260.0,
      -1.0 / 1680.0,        1.0 / 1188.0,          -691.0 / 360360.0,
      1.0 / 156.0,          -3617.0 / 122400.0,
  };
  const double log_two_pi = 1.8378770664093454836;
  double series = 0.0;
  const double z2 = z * z;
  double zpow = z;
  for (double c : coeff) {
    series += c / zpow;
    zpow *= z2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * log_two_pi + series - shift;
}

}  // namespace mfg
