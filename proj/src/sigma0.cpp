#include "sigma0.hpp"

#include <array>
#include <cmath>

namespace mfg {

namespace {

double mollifier(double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; }
double mollifier_d(double z) {
  return z > 0.0 ? std::exp(-1.0 / z) / (z * z) : 0.0;
}

// Smooth descent from 1 (z <= 0) to 0 (z >= 1).
double smooth_step_down(double z) {
  if (z <= 0.0) return 1.0;
  if (z >= 1.0) return 0.0;
  const double a = mollifier(z), b = mollifier(1.0 - z);
  return b / (a + b);
}

double smooth_step_down_d(double z) {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  const double a = mollifier(z), b = mollifier(1.0 - z);
  const double s = a + b;
  return -(a * mollifier_d(1.0 - z) + b * mollifier_d(z)) / (s * s);
}

// 20-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
constexpr std::array<double, 10> kGlNodes = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
    0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
    0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
    0.9931285991850949};
constexpr std::array<double, 10> kGlWeights = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
    0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
    0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
    0.0176140071391521};

double gauss_legendre(const std::function<double(double)>& g, double a,
                      double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < kGlNodes.size(); ++i)
    s += kGlWeights[i] * (g(mid + half * kGlNodes[i]) + g(mid - half * kGlNodes[i]));
  return s * half;
}

}  // namespace

Sigma0Model Sigma0Model::step_of_mean(double threshold, double left_value,
                                      double right_value) {
  Sigma0Model s;
  s.variant = Sigma0Variant::StepOfMean;
  s.threshold = threshold;
  s.left_value = left_value;
  s.right_value = right_value;
  s.uniform_bound = std::max(std::abs(left_value), std::abs(right_value));
  s.dm_bound = 0.0;
  return s;
}

Sigma0Model Sigma0Model::smooth_of_mean(std::function<double(double)> f,
                                        std::function<double(double)> f_prime,
                                        double uniform_bound, double dm_bound) {
  require(static_cast<bool>(f) && static_cast<bool>(f_prime),
          "smooth_of_mean requires f and f'");
  Sigma0Model s;
  s.variant = Sigma0Variant::SmoothOfMean;
  s.f = std::move(f);
  s.f_prime = std::move(f_prime);
  s.uniform_bound = uniform_bound;
  s.dm_bound = dm_bound;
  return s;
}

Sigma0Model Sigma0Model::moment_functional(std::vector<MomentTerm> terms,
                                           double uniform_bound,
                                           double dm_bound) {
  for (const MomentTerm& t : terms)
    require(t.m1_pow >= 0 && t.m2_pow >= 0,
            "moment_functional requires nonnegative powers");
  Sigma0Model s;
  s.variant = Sigma0Variant::MomentFunctional;
  s.terms = std::move(terms);
  s.uniform_bound = uniform_bound;
  s.dm_bound = dm_bound;
  return s;
}

Sigma0Model Sigma0Model::mean_of_function(std::function<double(double)> phi,
                                          std::function<double(double)> phi_prime,
                                          double uniform_bound, double dm_bound) {
  require(static_cast<bool>(phi), "mean_of_function requires phi");
  Sigma0Model s;
  s.variant = Sigma0Variant::MeanOfFunction;
  s.f = std::move(phi);
  s.f_prime = std::move(phi_prime);
  s.uniform_bound = uniform_bound;
  s.dm_bound = dm_bound;
  return s;
}

double Sigma0Model::bump(double second_moment) const {
  if (!cutoff_radius) return 1.0;
  const double r2 = *cutoff_radius * *cutoff_radius;
  return smooth_step_down(2.0 * second_moment / r2 - 1.0);
}

double Sigma0Model::bump_derivative(double second_moment) const {
  if (!cutoff_radius) return 0.0;
  const double r2 = *cutoff_radius * *cutoff_radius;
  return smooth_step_down_d(2.0 * second_moment / r2 - 1.0) * 2.0 / r2;
}

double Sigma0Model::base_from_moments(double mean, double second_moment) const {
  switch (variant) {
    case Sigma0Variant::StepOfMean:
      // Equality goes right: left value strictly below the threshold.
      return mean < threshold ? left_value : right_value;
    case Sigma0Variant::SmoothOfMean:
      return f(mean);
    case Sigma0Variant::MomentFunctional: {
      double s = 0.0;
      for (const MomentTerm& t : terms)
        s += t.coef * std::pow(mean, t.m1_pow) * std::pow(second_moment, t.m2_pow);
      return s;
    }
    case Sigma0Variant::MeanOfFunction:
      throw PreconditionError(
          "mean_of_function is not determined by moments alone");
  }
  return 0.0;
}

double Sigma0Model::value_points(const double* xs, size_t n) const {
  require(n >= 1, "sigma0 requires at least one point");
  double s1 = 0.0, s2 = 0.0, sphi = 0.0;
  for (size_t i = 0; i < n; ++i) {
    s1 += xs[i];
    s2 += xs[i] * xs[i];
    if (variant == Sigma0Variant::MeanOfFunction) sphi += f(xs[i]);
  }
  const double mean = s1 / static_cast<double>(n);
  const double m2 = s2 / static_cast<double>(n);
  const double base = variant == Sigma0Variant::MeanOfFunction
                          ? sphi / static_cast<double>(n)
                          : base_from_moments(mean, m2);
  return bump(m2) * base;
}

double Sigma0Model::value_measure(const Measure1D& m) const {
  const double mean = m.barycenter();
  const double m2 = m.second_moment();
  double base;
  if (variant == Sigma0Variant::MeanOfFunction) {
    double s = 0.0;
    for (const Atom& a : m.atoms()) s += a.mass * f(a.location);
    for (const Piece& p : m.pieces()) {
      const double density = p.mass / (p.right - p.left);
      s += density * gauss_legendre(f, p.left, p.right);
    }
    base = s / m.total_mass();
  } else {
    base = base_from_moments(mean, m2);
  }
  return bump(m2) * base;
}

double Sigma0Model::dm(double x, double mean, double second_moment,
                       double base_value) const {
  double base_dm;
  switch (variant) {
    case Sigma0Variant::StepOfMean:
      throw PreconditionError("step coupling is not differentiable");
    case Sigma0Variant::SmoothOfMean:
      base_dm = f_prime(mean);
      break;
    case Sigma0Variant::MomentFunctional: {
      double d1 = 0.0, d2 = 0.0;
      for (const MomentTerm& t : terms) {
        if (t.m1_pow > 0)
          d1 += t.coef * t.m1_pow * std::pow(mean, t.m1_pow - 1) *
                std::pow(second_moment, t.m2_pow);
        if (t.m2_pow > 0)
          d2 += t.coef * std::pow(mean, t.m1_pow) * t.m2_pow *
                std::pow(second_moment, t.m2_pow - 1);
      }
      base_dm = d1 + 2.0 * x * d2;
      break;
    }
    case Sigma0Variant::MeanOfFunction:
      require(static_cast<bool>(f_prime), "mean_of_function lacks phi'");
      base_dm = f_prime(x);
      break;
    default:
      base_dm = 0.0;
  }
  if (!cutoff_radius) return base_dm;
  return bump_derivative(second_moment) * 2.0 * x * base_value +
         bump(second_moment) * base_dm;
}

}  // namespace mfg
