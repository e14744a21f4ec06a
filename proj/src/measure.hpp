#pragma once

#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace mfg {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

// Uniform density of total `mass` on [left, right].
struct Piece {
  double left = 0.0;
  double right = 0.0;
  double mass = 0.0;
};

// A measure on R made of finitely many atoms and uniform-density pieces.
// Canonicalized on construction: components sorted left to right, coincident
// atoms merged, overlapping pieces rebuilt on disjoint intervals, and pieces
// split at interior atom locations so the CDF walk is strictly sequential.
// Probability measures have total mass 1 (checked to 1e-12 when
// require_unit_mass is set); partition slices reuse the type with total 1/n.
class Measure1D {
 public:
  Measure1D() = default;
  Measure1D(std::vector<Atom> atoms, std::vector<Piece> pieces,
            bool require_unit_mass = true);

  static Measure1D uniform(double left, double right);
  static Measure1D dirac(double location);
  static Measure1D point_set(const std::vector<double>& points);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  double total_mass() const { return total_mass_; }
  double barycenter() const;
  double second_moment() const;
  double support_min() const;
  double support_max() const;
  bool empty() const { return atoms_.empty() && pieces_.empty(); }

  // m((-inf, x]); right-continuous and nondecreasing.
  double cdf(double x) const;
  // a_j = min{ x : cdf(x) >= j/n }. Ties on flat stretches resolve to the
  // leftmost point attaining the level.
  double quantile_cut(long j, long n) const;

  std::string to_json() const;
  static Measure1D from_json(const std::string& text);

 private:
  friend struct MeasureWalk;
  std::vector<Atom> atoms_;
  std::vector<Piece> pieces_;
  double total_mass_ = 0.0;
};

// Equal-mass partition of a probability measure into n ordered sub-measures
// of mass 1/n each. Sub-measures restrict the parent on interval interiors
// and split boundary atoms; summed back together they recompose the parent.
struct Partition1D {
  std::vector<Measure1D> sub_measures;
  std::vector<double> cut_points;  // a_1 <= ... <= a_{n-1}
  // Per distinct cut point carrying an atom: mass of that atom kept by the
  // sub-measure ending there and by the one starting there. Full 1/n copies
  // between the two are implicit.
  std::vector<std::pair<double, double>> atom_splits;
};

Partition1D partition(const Measure1D& m, int n);

struct Quantization {
  std::vector<double> points;  // nondecreasing
  double w2 = 0.0;             // distance of the point measure to the parent
};

// Best n-point uniform-weight approximation in quadratic transport distance:
// one barycenter per partition cell, with the cell-wise transport cost
// accumulated in closed form.
Quantization quantize(const Measure1D& m, int n);

// Quadratic-cost transport distance via quantile functions; exact for this
// representation since both quantile functions are piecewise affine.
double w2_1d(const Measure1D& a, const Measure1D& b);

// Uniform-weight point cloud in R^d, stored row-major (point index fastest
// over coordinates).
struct EmpiricalMeasure {
  size_t dimension = 1;
  std::vector<double> points;  // n * dimension entries

  size_t count() const { return dimension ? points.size() / dimension : 0; }
};

struct EmpiricalStats {
  std::vector<double> mean;
  double second_moment = 0.0;
};

EmpiricalStats empirical_stats(const EmpiricalMeasure& e);

}  // namespace mfg
