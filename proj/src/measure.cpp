#include "measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

namespace mfg {

namespace {

constexpr double kMassTol = 1e-12;   // unit-mass check
constexpr double kSliceSnap = 1e-13; // absorbs rounding while slicing levels

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ConfigError(std::string(what) + " is not finite");
}

}  // namespace

// One entry of the left-to-right CDF walk: an atom (x0 == x1) or a density
// piece, occupying the cumulative-mass interval [lev0, lev1].
struct WalkComponent {
  double lev0 = 0.0, lev1 = 0.0;
  double x0 = 0.0, x1 = 0.0;
  double mass = 0.0;
  bool is_atom = false;

  double quantile(double u) const {
    if (is_atom || mass <= 0.0) return x0;
    if (u <= lev0) return x0;
    if (u >= lev1) return x1;
    return x0 + (u - lev0) * (x1 - x0) / mass;
  }
};

struct MeasureWalk {
  std::vector<WalkComponent> comps;

  static MeasureWalk of(const Measure1D& m) {
    struct Entry {
      double pos;
      int rank;  // atoms sort before pieces starting at the same point
      bool is_atom;
      size_t idx;
    };
    std::vector<Entry> entries;
    entries.reserve(m.atoms_.size() + m.pieces_.size());
    for (size_t i = 0; i < m.atoms_.size(); ++i)
      entries.push_back({m.atoms_[i].location, 0, true, i});
    for (size_t i = 0; i < m.pieces_.size(); ++i)
      entries.push_back({m.pieces_[i].left, 1, false, i});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.pos != b.pos) return a.pos < b.pos;
      return a.rank < b.rank;
    });
    MeasureWalk w;
    double cum = 0.0;
    for (const Entry& e : entries) {
      WalkComponent c;
      if (e.is_atom) {
        const Atom& a = m.atoms_[e.idx];
        c = {cum, cum + a.mass, a.location, a.location, a.mass, true};
      } else {
        const Piece& p = m.pieces_[e.idx];
        c = {cum, cum + p.mass, p.left, p.right, p.mass, false};
      }
      cum = c.lev1;
      w.comps.push_back(c);
    }
    return w;
  }
};

Measure1D::Measure1D(std::vector<Atom> atoms, std::vector<Piece> pieces,
                     bool require_unit_mass) {
  for (const Atom& a : atoms) {
    check_finite(a.location, "atom location");
    check_finite(a.mass, "atom mass");
    if (a.mass <= 0.0) throw ConfigError("atom mass must be positive");
  }
  for (const Piece& p : pieces) {
    check_finite(p.left, "piece left");
    check_finite(p.right, "piece right");
    check_finite(p.mass, "piece mass");
    if (p.mass <= 0.0) throw ConfigError("piece mass must be positive");
    if (!(p.left < p.right)) throw ConfigError("piece requires left < right");
  }

  // Merge coincident atoms.
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  for (const Atom& a : atoms) {
    if (!atoms_.empty() && atoms_.back().location == a.location)
      atoms_.back().mass += a.mass;
    else
      atoms_.push_back(a);
  }

  // Rebuild overlapping pieces on disjoint intervals (density sums); pieces
  // that touch nothing pass through verbatim so their masses stay bit-exact.
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.left < b.left; });
  size_t i = 0;
  while (i < pieces.size()) {
    size_t j = i + 1;
    double reach = pieces[i].right;
    while (j < pieces.size() && pieces[j].left < reach) {
      reach = std::max(reach, pieces[j].right);
      ++j;
    }
    if (j == i + 1) {
      pieces_.push_back(pieces[i]);
    } else {
      std::vector<double> cuts;
      for (size_t k = i; k < j; ++k) {
        cuts.push_back(pieces[k].left);
        cuts.push_back(pieces[k].right);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        double density = 0.0;
        for (size_t k = i; k < j; ++k)
          if (pieces[k].left <= cuts[c] && cuts[c + 1] <= pieces[k].right)
            density += pieces[k].mass / (pieces[k].right - pieces[k].left);
        if (density > 0.0)
          pieces_.push_back({cuts[c], cuts[c + 1], density * (cuts[c + 1] - cuts[c])});
      }
    }
    i = j;
  }

  // Split pieces at interior atom locations so the walk is sequential.
  std::vector<Piece> split;
  for (const Piece& p : pieces_) {
    double lo = p.left;
    const double density = p.mass / (p.right - p.left);
    bool cut = false;
    for (const Atom& a : atoms_) {
      if (a.location > p.left && a.location < p.right) {
        split.push_back({lo, a.location, density * (a.location - lo)});
        lo = a.location;
        cut = true;
      }
    }
    if (cut)
      split.push_back({lo, p.right, density * (p.right - lo)});
    else
      split.push_back(p);
  }
  pieces_ = std::move(split);

  total_mass_ = 0.0;
  for (const Atom& a : atoms_) total_mass_ += a.mass;
  for (const Piece& p : pieces_) total_mass_ += p.mass;
  if (require_unit_mass) {
    if (empty()) throw ConfigError("measure has no components");
    if (std::abs(total_mass_ - 1.0) > kMassTol)
      throw ConfigError("measure mass " + std::to_string(total_mass_) +
                        " is not 1 within 1e-12");
  }
}

Measure1D Measure1D::uniform(double left, double right) {
  return Measure1D({}, {{left, right, 1.0}});
}

Measure1D Measure1D::dirac(double location) {
  return Measure1D({{location, 1.0}}, {});
}

Measure1D Measure1D::point_set(const std::vector<double>& points) {
  if (points.empty()) throw ConfigError("point_set requires points");
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  const double w = 1.0 / static_cast<double>(points.size());
  for (double x : points) atoms.push_back({x, w});
  return Measure1D(std::move(atoms), {}, false);
}

double Measure1D::barycenter() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.location * a.mass;
  for (const Piece& p : pieces_) s += 0.5 * (p.left + p.right) * p.mass;
  return s / total_mass_;
}

double Measure1D::second_moment() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.location * a.location * a.mass;
  for (const Piece& p : pieces_) {
    const double mid = 0.5 * (p.left + p.right);
    const double w = p.right - p.left;
    s += (mid * mid + w * w / 12.0) * p.mass;
  }
  return s / total_mass_;
}

double Measure1D::support_min() const {
  double v = std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) v = std::min(v, a.location);
  for (const Piece& p : pieces_) v = std::min(v, p.left);
  return v;
}

double Measure1D::support_max() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) v = std::max(v, a.location);
  for (const Piece& p : pieces_) v = std::max(v, p.right);
  return v;
}

double Measure1D::cdf(double x) const {
  double s = 0.0;
  for (const Atom& a : atoms_)
    if (a.location <= x) s += a.mass;
  for (const Piece& p : pieces_) {
    if (x >= p.right)
      s += p.mass;
    else if (x > p.left)
      s += p.mass * (x - p.left) / (p.right - p.left);
  }
  return s;
}

double Measure1D::quantile_cut(long j, long n) const {
  require(n >= 1 && j >= 1 && j <= n - 1, "quantile_cut requires 1 <= j <= n-1");
  const double p = static_cast<double>(j) / static_cast<double>(n) * total_mass_;
  const MeasureWalk walk = MeasureWalk::of(*this);
  double last_x = support_min();
  for (const WalkComponent& c : walk.comps) {
    if (c.lev0 >= p) return last_x;  // level attained before this component
    if (c.lev1 >= p) {
      if (c.is_atom) return c.x0;
      return c.x0 + (p - c.lev0) * (c.x1 - c.x0) / c.mass;
    }
    last_x = c.x1;
  }
  return last_x;
}

std::string Measure1D::to_json() const {
  nlohmann::ordered_json j;
  j["atoms"] = nlohmann::ordered_json::array();
  for (const Atom& a : atoms_) j["atoms"].push_back({a.location, a.mass});
  j["pieces"] = nlohmann::ordered_json::array();
  for (const Piece& p : pieces_) j["pieces"].push_back({p.left, p.right, p.mass});
  return j.dump();
}

Measure1D Measure1D::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measure json: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("measure json must be an object");
  for (const auto& item : j.items())
    if (item.key() != "atoms" && item.key() != "pieces")
      throw ConfigError("measure json: unknown key '" + item.key() + "'");
  std::vector<Atom> atoms;
  std::vector<Piece> pieces;
  if (j.contains("atoms")) {
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2)
        throw ConfigError("measure json: atoms entries are [location, mass]");
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
  }
  if (j.contains("pieces")) {
    for (const auto& p : j.at("pieces")) {
      if (!p.is_array() || p.size() != 3)
        throw ConfigError("measure json: pieces entries are [left, right, mass]");
      pieces.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
  }
  return Measure1D(std::move(atoms), std::move(pieces));
}

Partition1D partition(const Measure1D& m, int n) {
  require(n >= 1, "partition requires n >= 1");
  require(std::abs(m.total_mass() - 1.0) <= kMassTol,
          "partition requires a probability measure");

  Partition1D out;
  std::vector<std::vector<Atom>> sub_atoms(static_cast<size_t>(n));
  std::vector<std::vector<Piece>> sub_pieces(static_cast<size_t>(n));

  const MeasureWalk walk = MeasureWalk::of(m);
  int slot = 1;
  double cum = 0.0;
  auto slot_target = [&](int s) {
    return s >= n ? std::numeric_limits<double>::infinity()
                  : static_cast<double>(s) / static_cast<double>(n);
  };

  for (const WalkComponent& c : walk.comps) {
    double mass_left = c.mass;
    double x_cursor = c.x0;
    double consumed = 0.0;
    while (mass_left > kSliceSnap) {
      double capacity = slot_target(slot) - cum;
      if (capacity <= kSliceSnap && slot < n) {
        ++slot;
        continue;
      }
      double take = std::min(mass_left, capacity);
      if (std::abs(mass_left - capacity) <= kSliceSnap) take = mass_left;
      const size_t s = static_cast<size_t>(slot - 1);
      if (c.is_atom) {
        sub_atoms[s].push_back({c.x0, take});
      } else {
        consumed += take;
        const double x_hi = (mass_left - take <= kSliceSnap)
                                ? c.x1
                                : c.x0 + consumed / c.mass * (c.x1 - c.x0);
        sub_pieces[s].push_back({x_cursor, x_hi, take});
        x_cursor = x_hi;
      }
      cum += take;
      mass_left -= take;
      if (mass_left <= kSliceSnap) mass_left = 0.0;
      if (slot_target(slot) - cum <= kSliceSnap && slot < n) ++slot;
    }
  }

  out.sub_measures.reserve(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s)
    out.sub_measures.emplace_back(std::move(sub_atoms[static_cast<size_t>(s)]),
                                  std::move(sub_pieces[static_cast<size_t>(s)]),
                                  false);

  for (int j = 1; j <= n - 1; ++j) out.cut_points.push_back(m.quantile_cut(j, n));

  // Residual atom masses at each distinct cut point: share kept by the
  // sub-measure ending there and by the one starting there; interior full
  // copies of mass 1/n are implicit.
  std::vector<double> distinct = out.cut_points;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (double a : distinct) {
    double first_share = 0.0, last_share = 0.0;
    int first_idx = -1, last_idx = -1;
    for (int s = 0; s < n; ++s) {
      for (const Atom& atom : out.sub_measures[static_cast<size_t>(s)].atoms()) {
        if (atom.location == a) {
          if (first_idx < 0) {
            first_idx = s;
            first_share = atom.mass;
          }
          last_idx = s;
          last_share = atom.mass;
        }
      }
    }
    const double full = 1.0 / static_cast<double>(n);
    const double left_res =
        (first_idx >= 0 && first_share < full - kMassTol) ? first_share : 0.0;
    const double right_res =
        (last_idx >= 0 && last_idx != first_idx && last_share < full - kMassTol)
            ? last_share
            : 0.0;
    out.atom_splits.emplace_back(left_res, right_res);
  }
  return out;
}

Quantization quantize(const Measure1D& m, int n) {
  Partition1D part = partition(m, n);
  Quantization q;
  q.points.reserve(static_cast<size_t>(n));
  double cost = 0.0;
  for (const Measure1D& sub : part.sub_measures) {
    // A slice concentrated at one location has that location as its
    // barycenter exactly; skip the mass division to keep it bit-exact.
    double c;
    if (sub.pieces().empty() && !sub.atoms().empty() &&
        sub.atoms().front().location == sub.atoms().back().location) {
      c = sub.atoms().front().location;
    } else {
      c = sub.barycenter();
    }
    q.points.push_back(c);
    for (const Atom& a : sub.atoms())
      cost += a.mass * (a.location - c) * (a.location - c);
    for (const Piece& p : sub.pieces()) {
      const double mid = 0.5 * (p.left + p.right);
      const double w = p.right - p.left;
      cost += p.mass * ((mid - c) * (mid - c) + w * w / 12.0);
    }
  }
  q.w2 = std::sqrt(std::max(0.0, cost));
  return q;
}

double w2_1d(const Measure1D& a, const Measure1D& b) {
  require(std::abs(a.total_mass() - b.total_mass()) <= kMassTol,
          "w2 requires equal total masses");
  const MeasureWalk wa = MeasureWalk::of(a);
  const MeasureWalk wb = MeasureWalk::of(b);
  std::vector<double> levels{0.0};
  for (const WalkComponent& c : wa.comps) levels.push_back(c.lev1);
  for (const WalkComponent& c : wb.comps) levels.push_back(c.lev1);
  levels.push_back(std::min(a.total_mass(), b.total_mass()));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  size_t ia = 0, ib = 0;
  double acc = 0.0;
  for (size_t k = 0; k + 1 < levels.size(); ++k) {
    const double u0 = levels[k], u1 = levels[k + 1];
    if (u1 - u0 <= 0.0) continue;
    const double um = 0.5 * (u0 + u1);
    if (um >= std::min(a.total_mass(), b.total_mass())) break;
    while (ia + 1 < wa.comps.size() && wa.comps[ia].lev1 <= um) ++ia;
    while (ib + 1 < wb.comps.size() && wb.comps[ib].lev1 <= um) ++ib;
    const double d0 = wa.comps[ia].quantile(u0) - wb.comps[ib].quantile(u0);
    const double d1 = wa.comps[ia].quantile(u1) - wb.comps[ib].quantile(u1);
    acc += (u1 - u0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  }
  return std::sqrt(std::max(0.0, acc));
}

EmpiricalStats empirical_stats(const EmpiricalMeasure& e) {
  require(e.dimension >= 1, "empirical measure requires dimension >= 1");
  require(!e.points.empty() && e.points.size() % e.dimension == 0,
          "empirical measure requires n >= 1 complete points");
  for (double v : e.points)
    if (!std::isfinite(v)) throw ConfigError("empirical point is not finite");
  EmpiricalStats s;
  s.mean.assign(e.dimension, 0.0);
  const size_t n = e.count();
  for (size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (size_t k = 0; k < e.dimension; ++k) {
      const double v = e.points[i * e.dimension + k];
      s.mean[k] += v;
      norm2 += v * v;
    }
    s.second_moment += norm2;
  }
  for (double& v : s.mean) v /= static_cast<double>(n);
  s.second_moment /= static_cast<double>(n);
  return s;
}

}  // namespace mfg
