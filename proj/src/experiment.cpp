#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <set>

#include <json.hpp>

#include "analysis.hpp"
#include "csvio.hpp"
#include "equilibrium.hpp"
#include "measure.hpp"
#include "pde.hpp"

namespace mfg {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Strict object reader: every key must be consumed, unknown keys are errors.
struct ObjReader {
  const json& j;
  std::string path;
  std::set<std::string> seen;

  ObjReader(const json& obj, std::string p) : j(obj), path(std::move(p)) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
  }

  bool has(const char* k) const { return j.contains(k); }

  const json& at(const char* k) {
    seen.insert(k);
    if (!j.contains(k)) throw ConfigError(path + ": missing key '" + k + "'");
    return j.at(k);
  }

  const json* opt(const char* k) {
    seen.insert(k);
    return j.contains(k) ? &j.at(k) : nullptr;
  }

  double num(const char* k, double def) {
    const json* v = opt(k);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError(path + "." + k + ": expected a number");
    return v->get<double>();
  }

  double req_num(const char* k) {
    const json& v = at(k);
    if (!v.is_number()) throw ConfigError(path + "." + k + ": expected a number");
    return v.get<double>();
  }

  int integer(const char* k, int def) {
    const json* v = opt(k);
    if (!v) return def;
    if (!v->is_number_integer())
      throw ConfigError(path + "." + k + ": expected an integer");
    return v->get<int>();
  }

  int req_integer(const char* k) {
    const json& v = at(k);
    if (!v.is_number_integer())
      throw ConfigError(path + "." + k + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const char* k, bool def) {
    const json* v = opt(k);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(path + "." + k + ": expected a bool");
    return v->get<bool>();
  }

  std::string str(const char* k, const std::string& def) {
    const json* v = opt(k);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(path + "." + k + ": expected a string");
    return v->get<std::string>();
  }

  std::string req_str(const char* k) {
    const json& v = at(k);
    if (!v.is_string()) throw ConfigError(path + "." + k + ": expected a string");
    return v.get<std::string>();
  }

  void done() {
    for (const auto& item : j.items())
      if (!seen.count(item.key()))
        throw ConfigError(path + ": unknown key '" + item.key() + "'");
  }
};

std::pair<double, double> pair_of(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(path + ": expected [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

// ---- measure ----

Measure1D parse_measure(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected a measure object");
  return Measure1D::from_json(j.dump());
}

ojson measure_to_json(const Measure1D& m) {
  return ojson::parse(m.to_json());
}

// ---- drift ----

struct DriftConfig {
  std::string variant = "constant_in_x";
  double kappa = 0.0;
  double sigma_lo = -0.5, sigma_hi = 1.5;
  double x_lo = -8.0, x_hi = 8.0;
  double horizon = 2.0;

  static DriftConfig parse(const json& j, const std::string& path) {
    ObjReader r(j, path);
    DriftConfig c;
    c.variant = r.str("variant", c.variant);
    if (c.variant != "constant_in_x" && c.variant != "linear_quadratic")
      throw ConfigError(path + ".variant: '" + c.variant +
                        "' is not serializable (constant_in_x, linear_quadratic)");
    if (r.has("sigma_range")) {
      auto p = pair_of(r.at("sigma_range"), path + ".sigma_range");
      c.sigma_lo = p.first;
      c.sigma_hi = p.second;
    } else {
      r.opt("sigma_range");
    }
    if (c.variant == "linear_quadratic") {
      c.kappa = r.num("kappa", c.kappa);
      if (r.has("x_box")) {
        auto p = pair_of(r.at("x_box"), path + ".x_box");
        c.x_lo = p.first;
        c.x_hi = p.second;
      } else {
        r.opt("x_box");
      }
      c.horizon = r.num("horizon", c.horizon);
    }
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["variant"] = variant;
    j["sigma_range"] = {sigma_lo, sigma_hi};
    if (variant == "linear_quadratic") {
      j["kappa"] = kappa;
      j["x_box"] = {x_lo, x_hi};
      j["horizon"] = horizon;
    }
    return j;
  }

  DriftModel build() const {
    if (variant == "constant_in_x")
      return DriftModel::constant_in_x(sigma_lo, sigma_hi);
    return DriftModel::linear_quadratic(kappa, sigma_lo, sigma_hi, x_lo, x_hi,
                                        horizon);
  }
};

// ---- sigma0 ----

struct Sigma0Config {
  std::string variant = "step_of_mean";
  double threshold = 0.0, left_value = 1.0, right_value = 0.0;
  std::string profile = "tanh";  // smooth_of_mean
  double amplitude = 1.0, slope = 1.0, shift = 0.0;
  std::string function = "odd_power";  // mean_of_function
  double alpha = 0.5;
  std::vector<MomentTerm> terms;
  double uniform_bound = 0.0, dm_bound = 0.0;
  bool has_cutoff = false;
  double cutoff_radius = 0.0;

  static Sigma0Config parse(const json& j, const std::string& path) {
    ObjReader r(j, path);
    Sigma0Config c;
    c.variant = r.str("variant", c.variant);
    if (c.variant == "step_of_mean") {
      c.threshold = r.num("threshold", c.threshold);
      c.left_value = r.num("left_value", c.left_value);
      c.right_value = r.num("right_value", c.right_value);
    } else if (c.variant == "smooth_of_mean") {
      c.profile = r.str("profile", c.profile);
      if (c.profile != "tanh")
        throw ConfigError(path + ".profile: only 'tanh' is serializable");
      c.amplitude = r.num("amplitude", c.amplitude);
      c.slope = r.num("slope", c.slope);
      c.shift = r.num("shift", c.shift);
    } else if (c.variant == "mean_of_function") {
      c.function = r.str("function", c.function);
      if (c.function != "odd_power")
        throw ConfigError(path + ".function: only 'odd_power' is serializable");
      c.alpha = r.num("alpha", c.alpha);
    } else if (c.variant == "moment_functional") {
      const json& terms = r.at("terms");
      if (!terms.is_array() || terms.empty())
        throw ConfigError(path + ".terms: expected a nonempty array");
      for (size_t i = 0; i < terms.size(); ++i) {
        ObjReader tr(terms[i], path + ".terms[" + std::to_string(i) + "]");
        MomentTerm t;
        t.coef = tr.req_num("coef");
        t.m1_pow = tr.integer("m1_pow", 0);
        t.m2_pow = tr.integer("m2_pow", 0);
        tr.done();
        c.terms.push_back(t);
      }
      c.uniform_bound = r.num("uniform_bound", 0.0);
      c.dm_bound = r.num("dm_bound", 0.0);
    } else {
      throw ConfigError(path + ".variant: unknown '" + c.variant + "'");
    }
    if (r.has("cutoff_radius")) {
      const json& v = r.at("cutoff_radius");
      if (!v.is_null()) {
        if (!v.is_number() || v.get<double>() <= 0.0)
          throw ConfigError(path + ".cutoff_radius: expected a positive number");
        c.has_cutoff = true;
        c.cutoff_radius = v.get<double>();
      }
    } else {
      r.opt("cutoff_radius");
    }
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["variant"] = variant;
    if (variant == "step_of_mean") {
      j["threshold"] = threshold;
      j["left_value"] = left_value;
      j["right_value"] = right_value;
    } else if (variant == "smooth_of_mean") {
      j["profile"] = profile;
      j["amplitude"] = amplitude;
      j["slope"] = slope;
      j["shift"] = shift;
    } else if (variant == "mean_of_function") {
      j["function"] = function;
      j["alpha"] = alpha;
    } else {
      j["terms"] = ojson::array();
      for (const MomentTerm& t : terms) {
        ojson tj;
        tj["coef"] = t.coef;
        tj["m1_pow"] = t.m1_pow;
        tj["m2_pow"] = t.m2_pow;
        j["terms"].push_back(tj);
      }
      j["uniform_bound"] = uniform_bound;
      j["dm_bound"] = dm_bound;
    }
    j["cutoff_radius"] = has_cutoff ? ojson(cutoff_radius) : ojson(nullptr);
    return j;
  }

  Sigma0Model build() const {
    Sigma0Model s;
    if (variant == "step_of_mean") {
      s = Sigma0Model::step_of_mean(threshold, left_value, right_value);
    } else if (variant == "smooth_of_mean") {
      const double a = amplitude, k = slope, x0 = shift;
      s = Sigma0Model::smooth_of_mean(
          [a, k, x0](double x) { return a * std::tanh(k * (x - x0)); },
          [a, k, x0](double x) {
            const double c = std::cosh(k * (x - x0));
            return a * k / (c * c);
          },
          std::abs(a), std::abs(a * k));
    } else if (variant == "mean_of_function") {
      const double p = alpha;
      s = Sigma0Model::mean_of_function(
          [p](double x) {
            return x == 0.0 ? 0.0
                            : (x > 0.0 ? std::pow(x, p) : -std::pow(-x, p));
          },
          [p](double x) { return p * std::pow(std::abs(x), p - 1.0); },
          std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity());
    } else {
      s = Sigma0Model::moment_functional(terms, uniform_bound, dm_bound);
    }
    if (has_cutoff) s.cutoff_radius = cutoff_radius;
    return s;
  }
};

// ---- game / grid / scheme ----

struct GameConfig {
  DriftConfig drift;
  Sigma0Config sigma0;
  double horizon = 1.0;
  int quantization_points = 64;
  int steps_per_unit_time = 200;

  static GameConfig parse(const json& j, const std::string& path) {
    ObjReader r(j, path);
    GameConfig c;
    c.drift = DriftConfig::parse(r.at("drift"), path + ".drift");
    c.sigma0 = Sigma0Config::parse(r.at("sigma0"), path + ".sigma0");
    c.horizon = r.num("horizon", c.horizon);
    c.quantization_points = r.integer("quantization_points", c.quantization_points);
    c.steps_per_unit_time = r.integer("steps_per_unit_time", c.steps_per_unit_time);
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["drift"] = drift.to_json();
    j["sigma0"] = sigma0.to_json();
    j["horizon"] = horizon;
    j["quantization_points"] = quantization_points;
    j["steps_per_unit_time"] = steps_per_unit_time;
    return j;
  }

  GameSpec build() const {
    GameSpec g{drift.build(), sigma0.build(), horizon,
               FlowConfig{steps_per_unit_time}, quantization_points};
    return g;
  }
};

struct GridConfig {
  std::vector<GridAxis> axes{{-2.0, 3.0, 400}};

  static GridConfig parse(const json& j, const std::string& path) {
    ObjReader r(j, path);
    GridConfig c;
    if (r.has("axes")) {
      const json& axes = r.at("axes");
      if (!axes.is_array() || axes.empty() || axes.size() > 2)
        throw ConfigError(path + ".axes: expected 1 or 2 axes");
      c.axes.clear();
      for (size_t i = 0; i < axes.size(); ++i) {
        ObjReader ar(axes[i], path + ".axes[" + std::to_string(i) + "]");
        GridAxis a;
        a.lo = ar.req_num("min");
        a.hi = ar.req_num("max");
        a.cells = ar.req_integer("cells");
        ar.done();
        c.axes.push_back(a);
      }
    } else {
      r.opt("axes");
    }
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["axes"] = ojson::array();
    for (const GridAxis& a : axes) {
      ojson aj;
      aj["min"] = a.lo;
      aj["max"] = a.hi;
      aj["cells"] = a.cells;
      j["axes"].push_back(aj);
    }
    return j;
  }

  Grid build() const { return make_grid(axes); }
};

struct SchemeConfigDoc {
  double cfl = 0.45;
  double viscosity = 0.0;
  bool cell_center_source = false;

  static SchemeConfigDoc parse(const json& j, const std::string& path) {
    ObjReader r(j, path);
    SchemeConfigDoc c;
    c.cfl = r.num("cfl", c.cfl);
    c.viscosity = r.num("viscosity", c.viscosity);
    c.cell_center_source = r.boolean("cell_center_source", c.cell_center_source);
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["cfl"] = cfl;
    j["viscosity"] = viscosity;
    j["cell_center_source"] = cell_center_source;
    return j;
  }

  SchemeConfig build() const { return {cfl, viscosity, cell_center_source}; }
};

std::string out_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

// ---- subcommand: quantize ----

struct QuantizeConfig {
  Measure1D measure;
  ojson measure_doc;
  int n = 1;

  static QuantizeConfig parse(const json& j) {
    ObjReader r(j, "quantize");
    QuantizeConfig c;
    c.measure = parse_measure(r.at("measure"), "quantize.measure");
    c.measure_doc = measure_to_json(c.measure);
    c.n = r.req_integer("n");
    if (c.n < 1) throw ConfigError("quantize.n: must be >= 1");
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["measure"] = measure_doc;
    j["n"] = n;
    return j;
  }
};

void run_quantize(const QuantizeConfig& c, const std::string& dir) {
  const Partition1D part = partition(c.measure, c.n);
  const Quantization q = quantize(c.measure, c.n);

  CsvWriter pts(out_path(dir, "quantize_points.csv"), {"j", "point"});
  for (size_t i = 0; i < q.points.size(); ++i)
    pts.row({std::to_string(i + 1), sci12(q.points[i])});

  CsvWriter summary(out_path(dir, "quantize_summary.csv"),
                    {"n", "w2", "w2_squared", "barycenter", "points_mean"});
  double pmean = 0.0;
  for (double p : q.points) pmean += p;
  pmean /= static_cast<double>(q.points.size());
  summary.row({std::to_string(c.n), sci12(q.w2), sci12(q.w2 * q.w2),
               sci12(c.measure.barycenter()), sci12(pmean)});

  CsvWriter cells(out_path(dir, "partition.csv"),
                  {"cell", "kind", "left", "right", "location", "mass"});
  for (size_t s = 0; s < part.sub_measures.size(); ++s) {
    for (const Piece& p : part.sub_measures[s].pieces())
      cells.row({std::to_string(s + 1), "piece", sci12(p.left), sci12(p.right),
                 "", sci12(p.mass)});
    for (const Atom& a : part.sub_measures[s].atoms())
      cells.row({std::to_string(s + 1), "atom", "", "", sci12(a.location),
                 sci12(a.mass)});
  }
}

// ---- subcommand: mfg ----

struct MfgConfig {
  GameConfig game;
  Measure1D measure;
  ojson measure_doc;
  int grid_points = 2048;
  double root_tolerance = 1e-9;

  static MfgConfig parse(const json& j) {
    ObjReader r(j, "mfg");
    MfgConfig c;
    c.game = GameConfig::parse(r.at("game"), "mfg.game");
    c.measure = parse_measure(r.at("measure"), "mfg.measure");
    c.measure_doc = measure_to_json(c.measure);
    c.grid_points = r.integer("grid_points", c.grid_points);
    c.root_tolerance = r.num("root_tolerance", c.root_tolerance);
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["game"] = game.to_json();
    j["measure"] = measure_doc;
    j["grid_points"] = grid_points;
    j["root_tolerance"] = root_tolerance;
    return j;
  }
};

void run_mfg(const MfgConfig& c, const std::string& dir) {
  const GameSpec spec = c.game.build();
  const EquilibriumReport rep =
      find_equilibria(spec, c.measure, c.grid_points, c.root_tolerance);
  CsvWriter samples(out_path(dir, "f_samples.csv"), {"sigma", "f"});
  for (const auto& s : rep.samples) samples.row({sci12(s.first), sci12(s.second)});
  CsvWriter eq(out_path(dir, "equilibria.csv"),
               {"kind", "sigma", "f_prime_estimate"});
  for (const EquilibriumRoot& root : rep.roots)
    eq.row({"root", sci12(root.sigma), sci12(root.f_prime_estimate)});
  for (double jmp : rep.jump_crossings) eq.row({"jump", sci12(jmp), ""});
}

// ---- subcommand: nplayer ----

struct NPlayerConfig {
  GameConfig game;
  std::string construction = "two_point";
  double a = 1.0, b = 1.0;
  double alpha = 0.5;
  int n = 10;
  Measure1D mu_tilde, nu_tilde;
  ojson mu_doc, nu_doc;
  std::vector<double> points, sigmas;

  static NPlayerConfig parse(const json& j) {
    ObjReader r(j, "nplayer");
    NPlayerConfig c;
    c.game = GameConfig::parse(r.at("game"), "nplayer.game");
    c.construction = r.str("construction", c.construction);
    if (c.construction == "two_point") {
      c.a = r.num("a", c.a);
      c.b = r.num("b", c.b);
      c.n = r.integer("n", c.n);
    } else if (c.construction == "alternating") {
      c.alpha = r.num("alpha", c.alpha);
      c.n = r.integer("n", c.n);
    } else if (c.construction == "two_population") {
      c.mu_tilde = parse_measure(r.at("mu_tilde"), "nplayer.mu_tilde");
      c.nu_tilde = parse_measure(r.at("nu_tilde"), "nplayer.nu_tilde");
      c.mu_doc = measure_to_json(c.mu_tilde);
      c.nu_doc = measure_to_json(c.nu_tilde);
      c.n = r.integer("n", c.n);
    } else if (c.construction == "verify") {
      for (const auto& v : r.at("points")) c.points.push_back(v.get<double>());
      for (const auto& v : r.at("sigmas")) c.sigmas.push_back(v.get<double>());
      if (c.points.size() != c.sigmas.size())
        throw ConfigError("nplayer: points and sigmas must have equal length");
    } else {
      throw ConfigError("nplayer.construction: unknown '" + c.construction + "'");
    }
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["game"] = game.to_json();
    j["construction"] = construction;
    if (construction == "two_point") {
      j["a"] = a;
      j["b"] = b;
      j["n"] = n;
    } else if (construction == "alternating") {
      j["alpha"] = alpha;
      j["n"] = n;
    } else if (construction == "two_population") {
      j["mu_tilde"] = mu_doc;
      j["nu_tilde"] = nu_doc;
      j["n"] = n;
    } else {
      j["points"] = points;
      j["sigmas"] = sigmas;
    }
    return j;
  }
};

void write_pattern_rows(CsvWriter& csv, const std::string& name,
                        const std::vector<double>& points,
                        const NPlayerSolution& sol) {
  for (size_t i = 0; i < sol.sigmas.size(); ++i)
    csv.row({name, std::to_string(i + 1), sci12(points[i]),
             sci12(sol.sigmas[i]), sci12(sol.residuals[i])});
}

void summarize(CsvWriter& csv, const std::string& name,
               const NPlayerSolution& sol) {
  double worst = 0.0;
  for (double r : sol.residuals) worst = std::max(worst, std::abs(r));
  csv.row({name, sol.exact ? "1" : "0", sci12(worst)});
}

void run_nplayer(const NPlayerConfig& c, const std::string& dir) {
  GameSpec spec = c.game.build();
  CsvWriter rows(out_path(dir, "nplayer_residuals.csv"),
                 {"pattern", "player", "point", "sigma", "residual"});
  CsvWriter sum(out_path(dir, "nplayer_summary.csv"),
                {"pattern", "exact", "max_abs_residual"});

  if (c.construction == "two_point") {
    const ThreeEquilibria tq =
        construct_two_point_game(c.a, c.b, spec.horizon, c.n);
    for (const auto& [name, pat] :
         {std::pair<std::string, const std::vector<double>*>{"low", &tq.pattern_low},
          {"high", &tq.pattern_high},
          {"mixed", &tq.pattern_mixed}}) {
      const NPlayerSolution sol = verify_nplayer(spec, tq.points, *pat);
      write_pattern_rows(rows, name, tq.points, sol);
      summarize(sum, name, sol);
    }
  } else if (c.construction == "alternating") {
    const AlternatingConstruction alt =
        construct_alternating(spec.horizon, c.n, c.alpha);
    GameSpec alt_spec = spec;
    alt_spec.sigma0 = alt.coupling;  // unbounded coupling, flagged below
    const NPlayerSolution sol = verify_nplayer(alt_spec, alt.points, alt.pattern);
    write_pattern_rows(rows, "alternating", alt.points, sol);
    summarize(sum, "alternating", sol);
    CsvWriter extra(out_path(dir, "nplayer_alternating.csv"),
                    {"magnitude", "coupling_unbounded"});
    extra.row({sci12(alt.magnitude), alt.coupling_unbounded ? "1" : "0"});
  } else if (c.construction == "two_population") {
    const auto two = construct_two_population(spec.drift, c.mu_tilde,
                                              c.nu_tilde, spec.horizon, c.n,
                                              spec.flow);
    CsvWriter extra(out_path(dir, "nplayer_two_population.csv"),
                    {"constructed", "split_index", "lambda", "time0_sum"});
    if (!two) {
      extra.row({"0", "", "", ""});
      return;
    }
    extra.row({"1", std::to_string(two->split_index), sci12(two->lambda),
               sci12(two->time0_sum)});
    for (const auto& [name, pat] :
         {std::pair<std::string, const std::vector<double>*>{"low", &two->pattern_low},
          {"high", &two->pattern_high},
          {"mixed", &two->pattern_mixed}}) {
      const NPlayerSolution sol = verify_nplayer(spec, two->points, *pat);
      write_pattern_rows(rows, name, two->points, sol);
      summarize(sum, name, sol);
    }
  } else {
    const NPlayerSolution sol = verify_nplayer(spec, c.points, c.sigmas);
    write_pattern_rows(rows, "verify", c.points, sol);
    summarize(sum, "verify", sol);
  }
}

// ---- subcommand: pde ----

struct PdeConfig {
  DriftConfig drift;
  Sigma0Config initial_sigma0;
  int players = 1;
  GridConfig grid;
  SchemeConfigDoc scheme;
  double t_end = 1.0;
  double epsilon = 0.0;  // when > 0 overrides viscosity with eps^(2N)/2
  int snapshot_stride = 0;
  bool write_csv = true;
  bool write_binary = false;

  static PdeConfig parse(const json& j) {
    ObjReader r(j, "pde");
    PdeConfig c;
    c.drift = DriftConfig::parse(r.at("drift"), "pde.drift");
    c.initial_sigma0 = Sigma0Config::parse(r.at("initial_sigma0"),
                                           "pde.initial_sigma0");
    c.players = r.integer("players", c.players);
    if (r.has("grid")) c.grid = GridConfig::parse(r.at("grid"), "pde.grid");
    else r.opt("grid");
    if (r.has("scheme"))
      c.scheme = SchemeConfigDoc::parse(r.at("scheme"), "pde.scheme");
    else r.opt("scheme");
    c.t_end = r.num("t_end", c.t_end);
    c.epsilon = r.num("epsilon", c.epsilon);
    c.snapshot_stride = r.integer("snapshot_stride", c.snapshot_stride);
    c.write_csv = r.boolean("write_csv", c.write_csv);
    c.write_binary = r.boolean("write_binary", c.write_binary);
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["drift"] = drift.to_json();
    j["initial_sigma0"] = initial_sigma0.to_json();
    j["players"] = players;
    j["grid"] = grid.to_json();
    j["scheme"] = scheme.to_json();
    j["t_end"] = t_end;
    j["epsilon"] = epsilon;
    j["snapshot_stride"] = snapshot_stride;
    j["write_csv"] = write_csv;
    j["write_binary"] = write_binary;
    return j;
  }
};

void run_pde(const PdeConfig& c, const std::string& dir) {
  const DriftModel drift = c.drift.build();
  const Sigma0Model s0 = c.initial_sigma0.build();
  const Grid grid = c.grid.build();
  SchemeConfig scheme = c.scheme.build();
  if (c.epsilon > 0.0)
    scheme.viscosity = 0.5 * std::pow(c.epsilon, 2.0 * c.players);

  GridState st = initial_from_sigma0(s0, grid, c.players, 1);
  CsvWriter diag(out_path(dir, "pde_diagnostics.csv"),
                 {"snapshot", "t", "min", "max", "tv", "mass"});
  long snapshot = 0, step_idx = 0;
  auto record = [&](const GridState& s) {
    const bool take = c.snapshot_stride > 0 && step_idx % c.snapshot_stride == 0;
    if (take || step_idx == 0) {
      double mn, mx;
      state_minmax(s, mn, mx);
      diag.row({std::to_string(snapshot), sci12(s.t), sci12(mn), sci12(mx),
                sci12(total_variation(s)), sci12(mass_integral(s))});
      if (take && c.write_csv && step_idx > 0)
        write_state_csv(s, out_path(dir, "pde_state_" + std::to_string(snapshot) + ".csv"));
      ++snapshot;
    }
    ++step_idx;
  };
  const GridState fin = run(st, drift, scheme, c.t_end, record);
  double mn, mx;
  state_minmax(fin, mn, mx);
  diag.row({std::to_string(snapshot), sci12(fin.t), sci12(mn), sci12(mx),
            sci12(total_variation(fin)), sci12(mass_integral(fin))});
  if (c.write_csv) write_state_csv(fin, out_path(dir, "pde_state_final.csv"));
  if (c.write_binary)
    write_state_binary(fin, out_path(dir, "pde_state_final.bin"));
}

// ---- subcommand: select ----

struct SelectConfig {
  Sigma0Config sigma0;
  double mean = 0.0;
  double t = 1.0;
  GridConfig grid;
  SchemeConfigDoc scheme;
  int grid_points = 2048;
  double root_tolerance = 1e-9;

  static SelectConfig parse(const json& j) {
    ObjReader r(j, "select");
    SelectConfig c;
    c.sigma0 = Sigma0Config::parse(r.at("sigma0"), "select.sigma0");
    c.mean = r.req_num("mean");
    c.t = r.num("t", c.t);
    if (r.has("grid")) c.grid = GridConfig::parse(r.at("grid"), "select.grid");
    else r.opt("grid");
    if (r.has("scheme"))
      c.scheme = SchemeConfigDoc::parse(r.at("scheme"), "select.scheme");
    else r.opt("scheme");
    c.grid_points = r.integer("grid_points", c.grid_points);
    c.root_tolerance = r.num("root_tolerance", c.root_tolerance);
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["sigma0"] = sigma0.to_json();
    j["mean"] = mean;
    j["t"] = t;
    j["grid"] = grid.to_json();
    j["scheme"] = scheme.to_json();
    j["grid_points"] = grid_points;
    j["root_tolerance"] = root_tolerance;
    return j;
  }
};

void run_select(const SelectConfig& c, const std::string& dir) {
  const Sigma0Model s0 = c.sigma0.build();
  const SelectionResult sel =
      select_equilibrium(s0, c.mean, c.t, c.grid.build(), c.scheme.build());
  CsvWriter out(out_path(dir, "select.csv"),
                {"mean", "t", "value", "resolved", "shock_distance_cells"});
  out.row({sci12(c.mean), sci12(c.t), sci12(sel.value), sel.resolved ? "1" : "0",
           sci12(sel.shock_distance)});

  // Root set of the matching one-parameter game for comparison.
  const double range = std::max(1.0, std::abs(s0.uniform_bound));
  GameSpec spec{DriftModel::constant_in_x(-range - 0.5, range + 0.5), s0, c.t,
                FlowConfig{}, 64};
  const EquilibriumReport rep = find_equilibria(spec, Measure1D::dirac(c.mean),
                                                c.grid_points, c.root_tolerance);
  CsvWriter roots(out_path(dir, "select_roots.csv"),
                  {"kind", "sigma", "f_prime_estimate"});
  for (const EquilibriumRoot& root : rep.roots)
    roots.row({"root", sci12(root.sigma), sci12(root.f_prime_estimate)});
  for (double jmp : rep.jump_crossings) roots.row({"jump", sci12(jmp), ""});
}

// ---- subcommand: sweep ----

struct SweepConfig {
  DriftConfig drift;
  Sigma0Config initial_sigma0;
  int players = 1;
  GridConfig grid;
  double cfl = 0.45;
  double t_end = 1.0;
  std::vector<double> epsilons{0.02, 0.04, 0.08, 0.16};
  std::string grad_integral = "initial_tv";  // or a number as string? see parse
  double grad_integral_value = 0.0;
  bool grad_from_tv = true;
  double radius = 0.0;

  static SweepConfig parse(const json& j) {
    ObjReader r(j, "sweep");
    SweepConfig c;
    c.drift = DriftConfig::parse(r.at("drift"), "sweep.drift");
    c.initial_sigma0 = Sigma0Config::parse(r.at("initial_sigma0"),
                                           "sweep.initial_sigma0");
    c.players = r.integer("players", c.players);
    if (r.has("grid")) c.grid = GridConfig::parse(r.at("grid"), "sweep.grid");
    else r.opt("grid");
    c.cfl = r.num("cfl", c.cfl);
    c.t_end = r.num("t_end", c.t_end);
    if (r.has("epsilons")) {
      c.epsilons.clear();
      for (const auto& v : r.at("epsilons")) {
        if (!v.is_number() || v.get<double>() <= 0.0)
          throw ConfigError("sweep.epsilons: expected positive numbers");
        c.epsilons.push_back(v.get<double>());
      }
      if (c.epsilons.size() < 3)
        throw ConfigError("sweep.epsilons: need at least 3 values");
    } else {
      r.opt("epsilons");
    }
    if (r.has("grad_integral")) {
      const json& v = r.at("grad_integral");
      if (v.is_string() && v.get<std::string>() == "initial_tv") {
        c.grad_from_tv = true;
      } else if (v.is_number()) {
        c.grad_from_tv = false;
        c.grad_integral_value = v.get<double>();
      } else {
        throw ConfigError("sweep.grad_integral: 'initial_tv' or a number");
      }
    } else {
      r.opt("grad_integral");
    }
    c.radius = r.num("radius", c.radius);
    r.done();
    return c;
  }

  ojson to_json() const {
    ojson j;
    j["drift"] = drift.to_json();
    j["initial_sigma0"] = initial_sigma0.to_json();
    j["players"] = players;
    j["grid"] = grid.to_json();
    j["cfl"] = cfl;
    j["t_end"] = t_end;
    j["epsilons"] = epsilons;
    if (grad_from_tv)
      j["grad_integral"] = "initial_tv";
    else
      j["grad_integral"] = grad_integral_value;
    j["radius"] = radius;
    return j;
  }
};

void run_sweep(const SweepConfig& c, const std::string& dir, int threads) {
  const DriftModel drift = c.drift.build();
  const Sigma0Model s0 = c.initial_sigma0.build();
  const Grid grid = c.grid.build();
  const GridState initial = initial_from_sigma0(s0, grid, c.players, 1);
  require(quiet_boundary_margin(initial) >= 5,
          "sweep: initial data must be constant within 5 cells of the boundary");

  const SchemeConfig base{c.cfl, 0.0, false};
  const GridState reference = run(initial, drift, base, c.t_end);
  require(quiet_boundary_margin(reference) >= 5,
          "sweep: moving structure reached the outflow boundary");

  std::vector<double> eps = c.epsilons;
  std::sort(eps.begin(), eps.end());
  std::vector<double> errors(eps.size());

  auto one = [&](size_t i) {
    SchemeConfig cfg = base;
    cfg.viscosity = 0.5 * std::pow(eps[i], 2.0 * c.players);
    const GridState viscous = run(initial, drift, cfg, c.t_end);
    errors[i] = l1_distance(reference, viscous);
  };
  if (threads > 1) {
    std::vector<std::future<void>> jobs;
    for (size_t i = 0; i < eps.size(); ++i)
      jobs.push_back(std::async(std::launch::async, one, i));
    for (auto& j : jobs) j.get();
  } else {
    for (size_t i = 0; i < eps.size(); ++i) one(i);
  }

  const double grad =
      c.grad_from_tv ? total_variation(initial) : c.grad_integral_value;
  CsvWriter out(out_path(dir, "sweep.csv"),
                {"epsilon", "nu", "l1_error", "theorem_bound", "corollary_bound"});
  std::vector<std::pair<double, double>> pairs;
  for (size_t i = 0; i < eps.size(); ++i) {
    BoundInputs b;
    b.n_players = c.players;
    b.d = 1;
    b.t = c.t_end;
    b.eps = eps[i];
    b.bound_b = drift.bound_b;
    b.bound_dxb = drift.bound_dxb;
    b.bound_hess_antideriv = drift.bound_hess_antideriv;
    b.grad_integral = grad;
    b.uniform_bound = s0.uniform_bound;
    b.radius = c.radius;
    const double tb = theorem_bound(b);
    const double cb = c.radius > 0.0 ? corollary_bound(b) : 0.0;
    out.row({sci12(eps[i]), sci12(0.5 * std::pow(eps[i], 2.0 * c.players)),
             sci12(errors[i]), sci12(tb), sci12(cb)});
    pairs.emplace_back(eps[i], errors[i]);
  }

  bool positive = true;
  for (const auto& p : pairs) positive = positive && p.second > 0.0;
  CsvWriter fitcsv(out_path(dir, "sweep_fit.csv"),
                   {"slope", "intercept", "r_squared"});
  if (positive) {
    const RateFit fit = fit_rate(pairs);
    fitcsv.row({sci12(fit.slope), sci12(fit.intercept), sci12(fit.r_squared)});
  } else {
    fitcsv.row({"", "", ""});
  }
}

template <typename Config>
ojson parse_to_doc(const std::string& text) {
  return Config::parse(parse_document(text)).to_json();
}

}  // namespace

void run_experiment(const std::string& subcommand, const std::string& config,
                    const std::string& out_dir, int threads) {
  const json doc = parse_document(config);
  if (subcommand == "quantize")
    run_quantize(QuantizeConfig::parse(doc), out_dir);
  else if (subcommand == "mfg")
    run_mfg(MfgConfig::parse(doc), out_dir);
  else if (subcommand == "nplayer")
    run_nplayer(NPlayerConfig::parse(doc), out_dir);
  else if (subcommand == "pde")
    run_pde(PdeConfig::parse(doc), out_dir);
  else if (subcommand == "select")
    run_select(SelectConfig::parse(doc), out_dir);
  else if (subcommand == "sweep")
    run_sweep(SweepConfig::parse(doc), out_dir, threads);
  else
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

std::string dump_config(const std::string& subcommand,
                        const std::string& config) {
  ojson doc;
  if (subcommand == "quantize")
    doc = parse_to_doc<QuantizeConfig>(config);
  else if (subcommand == "mfg")
    doc = parse_to_doc<MfgConfig>(config);
  else if (subcommand == "nplayer")
    doc = parse_to_doc<NPlayerConfig>(config);
  else if (subcommand == "pde")
    doc = parse_to_doc<PdeConfig>(config);
  else if (subcommand == "select")
    doc = parse_to_doc<SelectConfig>(config);
  else if (subcommand == "sweep")
    doc = parse_to_doc<SweepConfig>(config);
  else
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  return doc.dump(2) + "\n";
}

}  // namespace mfg
