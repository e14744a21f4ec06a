#include "pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "csvio.hpp"
#include "measure.hpp"

namespace mfg {

namespace {

constexpr long kMaxRunSteps = 20000000;

struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void check_finite_state(const GridState& s) {
  for (size_t i = 0; i < s.u.size(); ++i)
    if (!std::isfinite(s.u[i]))
      throw NumericalError("state non-finite at t=" + std::to_string(s.t) +
                           ", cell " + std::to_string(i));
}

// Upwind transport sweep along one axis with the source paired to the same
// interfaces, so exact constants produce identically zero updates.
void sweep_axis(GridState& s, const DriftModel& m, int axis, double dt,
                double t_eval, bool cell_center_source) {
  const GridAxis& ax = s.grid.axes[static_cast<size_t>(axis)];
  const int M = ax.cells;
  const double dx = ax.dx();
  const double lam = dt / dx;

  size_t stride, n_lines, line_step;
  if (s.grid.dim() == 1) {
    stride = 1;
    n_lines = 1;
    line_step = 0;
  } else {
    const int m1 = s.grid.axes[1].cells;
    if (axis == 0) {
      stride = static_cast<size_t>(m1);
      n_lines = static_cast<size_t>(m1);
      line_step = 1;
    } else {
      stride = 1;
      n_lines = static_cast<size_t>(s.grid.axes[0].cells);
      line_step = static_cast<size_t>(m1);
    }
  }

  std::vector<double> buf(static_cast<size_t>(M));
  std::vector<double> flux(static_cast<size_t>(M) + 1);
  for (size_t line = 0; line < n_lines; ++line) {
    const size_t base = line * line_step;
    for (int i = 0; i < M; ++i) buf[static_cast<size_t>(i)] = s.u[base + stride * static_cast<size_t>(i)];
    for (int i = 0; i <= M; ++i) {
      const double xi = ax.interface_pos(i);
      const double ul = buf[static_cast<size_t>(std::max(i - 1, 0))];
      const double ur = buf[static_cast<size_t>(std::min(i, M - 1))];
      flux[static_cast<size_t>(i)] = m.antiderivative_pos(t_eval, xi, ul) +
                                     m.antiderivative_neg(t_eval, xi, ur);
    }
    for (int i = 0; i < M; ++i) {
      const double ui = buf[static_cast<size_t>(i)];
      double src;
      if (cell_center_source) {
        src = m.antiderivative_dx(t_eval, ax.center(i), ui) * dx;
      } else {
        src = m.antiderivative(t_eval, ax.interface_pos(i + 1), ui) -
              m.antiderivative(t_eval, ax.interface_pos(i), ui);
      }
      s.u[base + stride * static_cast<size_t>(i)] =
          ui - lam * (flux[static_cast<size_t>(i + 1)] - flux[static_cast<size_t>(i)]) + lam * src;
    }
  }
}

// Backward-Euler diffusion along one axis: (I - r D2) u = rhs with zero-flux
// closure, solved by the tridiagonal sweep.
void diffuse_axis(GridState& s, int axis, double r) {
  const GridAxis& ax = s.grid.axes[static_cast<size_t>(axis)];
  const int M = ax.cells;
  size_t stride, n_lines, line_step;
  if (s.grid.dim() == 1) {
    stride = 1;
    n_lines = 1;
    line_step = 0;
  } else {
    const int m1 = s.grid.axes[1].cells;
    if (axis == 0) {
      stride = static_cast<size_t>(m1);
      n_lines = static_cast<size_t>(m1);
      line_step = 1;
    } else {
      stride = 1;
      n_lines = static_cast<size_t>(s.grid.axes[0].cells);
      line_step = static_cast<size_t>(m1);
    }
  }
  std::vector<double> cp(static_cast<size_t>(M)), dp(static_cast<size_t>(M));
  for (size_t line = 0; line < n_lines; ++line) {
    const size_t base = line * line_step;
    auto at = [&](int i) -> double& { return s.u[base + stride * static_cast<size_t>(i)]; };
    const double a = -r;
    double b0 = 1.0 + r;  // Neumann ends fold the ghost copy into the diagonal
    cp[0] = a / b0;
    dp[0] = at(0) / b0;
    for (int i = 1; i < M; ++i) {
      const double bi = (i == M - 1) ? 1.0 + r : 1.0 + 2.0 * r;
      const double denom = bi - a * cp[static_cast<size_t>(i - 1)];
      cp[static_cast<size_t>(i)] = a / denom;
      dp[static_cast<size_t>(i)] = (at(i) - a * dp[static_cast<size_t>(i - 1)]) / denom;
    }
    at(M - 1) = dp[static_cast<size_t>(M - 1)];
    for (int i = M - 2; i >= 0; --i)
      at(i) = dp[static_cast<size_t>(i)] - cp[static_cast<size_t>(i)] * at(i + 1);
  }
}

}  // namespace

size_t Grid::size() const {
  size_t n = 1;
  for (const GridAxis& a : axes) n *= static_cast<size_t>(a.cells);
  return n;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (const GridAxis& a : axes) v *= a.dx();
  return v;
}

bool Grid::operator==(const Grid& other) const {
  if (axes.size() != other.axes.size()) return false;
  for (size_t i = 0; i < axes.size(); ++i)
    if (axes[i].lo != other.axes[i].lo || axes[i].hi != other.axes[i].hi ||
        axes[i].cells != other.axes[i].cells)
      return false;
  return true;
}

Grid make_grid(const std::vector<GridAxis>& axes) {
  require(axes.size() == 1 || axes.size() == 2,
          "grid dimension must be 1 or 2");
  for (const GridAxis& a : axes) {
    require(a.lo < a.hi, "grid axis requires lo < hi");
    require(a.cells >= 4, "grid axis requires at least 4 cells");
  }
  Grid g;
  g.axes = axes;
  return g;
}

GridState initial_from_sigma0(const Sigma0Model& s0, const Grid& grid,
                              int n_players, int d) {
  require(n_players >= 1 && d >= 1, "players and d must be positive");
  require(n_players * d == grid.dim(),
          "initial data requires n_players * d == grid dimension");
  require(d == 1, "built-in couplings read measures on R (d = 1)");
  GridState st;
  st.grid = grid;
  st.t = 0.0;
  st.u.resize(grid.size());
  if (grid.dim() == 1) {
    const GridAxis& ax = grid.axes[0];
    for (int i = 0; i < ax.cells; ++i) {
      const double x = ax.center(i);
      st.u[static_cast<size_t>(i)] = s0.value_points(&x, 1);
    }
  } else {
    const GridAxis& a0 = grid.axes[0];
    const GridAxis& a1 = grid.axes[1];
    for (int i = 0; i < a0.cells; ++i) {
      for (int j = 0; j < a1.cells; ++j) {
        const double pts[2] = {a0.center(i), a1.center(j)};
        st.u[static_cast<size_t>(i) * static_cast<size_t>(a1.cells) +
             static_cast<size_t>(j)] = s0.value_points(pts, 2);
      }
    }
  }
  return st;
}

double stable_dt(const GridState& state, const DriftModel& model,
                 const SchemeConfig& cfg) {
  require(cfg.cfl > 0.0 && cfg.cfl <= 1.0, "cfl must lie in (0, 1]");
  double u_lo = state.u[0], u_hi = state.u[0];
  for (double v : state.u) {
    u_lo = std::min(u_lo, v);
    u_hi = std::max(u_hi, v);
  }
  double dt = std::numeric_limits<double>::infinity();
  for (const GridAxis& ax : state.grid.axes) {
    const double mb = model.max_abs_b(state.t, ax.lo, ax.hi, u_lo, u_hi);
    if (mb > 0.0) dt = std::min(dt, cfg.cfl * ax.dx() / mb);
  }
  return dt;
}

void step_by(GridState& state, const DriftModel& model, const SchemeConfig& cfg,
             double dt) {
  require(dt > 0.0 && std::isfinite(dt), "step requires finite dt > 0");
  require(cfg.viscosity >= 0.0, "viscosity must be >= 0");
  const double t_half = state.t + 0.5 * dt;
  if (state.grid.dim() == 1) {
    sweep_axis(state, model, 0, dt, t_half, cfg.cell_center_source);
  } else {
    sweep_axis(state, model, 0, 0.5 * dt, t_half, cfg.cell_center_source);
    sweep_axis(state, model, 1, dt, t_half, cfg.cell_center_source);
    sweep_axis(state, model, 0, 0.5 * dt, t_half, cfg.cell_center_source);
  }
  if (cfg.viscosity > 0.0) {
    for (int a = 0; a < state.grid.dim(); ++a) {
      const double dx = state.grid.axes[static_cast<size_t>(a)].dx();
      diffuse_axis(state, a, cfg.viscosity * dt / (dx * dx));
    }
  }
  state.t += dt;
  check_finite_state(state);
}

GridState step(const GridState& state, const DriftModel& model,
               const SchemeConfig& cfg) {
  GridState next = state;
  double dt = stable_dt(state, model, cfg);
  if (!std::isfinite(dt)) dt = state.grid.axes[0].dx();  // stationary drift
  step_by(next, model, cfg, dt);
  return next;
}

GridState run(const GridState& initial, const DriftModel& model,
              const SchemeConfig& cfg, double t_end,
              const std::function<void(const GridState&)>& recorder) {
  require(t_end >= initial.t, "run requires t_end >= current time");
  GridState st = initial;
  if (recorder) recorder(st);
  long steps = 0;
  const double tol = 1e-13 * std::max(1.0, std::abs(t_end));
  while (t_end - st.t > tol) {
    double dt = std::min(stable_dt(st, model, cfg), t_end - st.t);
    if (!std::isfinite(dt)) dt = t_end - st.t;
    step_by(st, model, cfg, dt);
    if (recorder) recorder(st);
    if (++steps > kMaxRunSteps)
      throw PreconditionError("run exceeded the step budget");
  }
  st.t = t_end;
  return st;
}

std::vector<GridState> run_recorded(const GridState& initial,
                                    const DriftModel& model,
                                    const SchemeConfig& cfg, double t_end) {
  std::vector<GridState> snaps;
  run(initial, model, cfg, t_end,
      [&](const GridState& s) { snaps.push_back(s); });
  return snaps;
}

double l1_distance(const GridState& a, const GridState& b) {
  require(a.grid == b.grid, "l1_distance requires identical grids");
  KahanSum s;
  for (size_t i = 0; i < a.u.size(); ++i) s.add(std::abs(a.u[i] - b.u[i]));
  return s.sum * a.grid.cell_volume();
}

double total_variation(const GridState& state) {
  KahanSum s;
  if (state.grid.dim() == 1) {
    for (size_t i = 0; i + 1 < state.u.size(); ++i)
      s.add(std::abs(state.u[i + 1] - state.u[i]));
    return s.sum;
  }
  const int m0 = state.grid.axes[0].cells;
  const int m1 = state.grid.axes[1].cells;
  const double dx0 = state.grid.axes[0].dx();
  const double dx1 = state.grid.axes[1].dx();
  auto at = [&](int i, int j) {
    return state.u[static_cast<size_t>(i) * static_cast<size_t>(m1) +
                   static_cast<size_t>(j)];
  };
  for (int i = 0; i + 1 < m0; ++i)
    for (int j = 0; j < m1; ++j) s.add(std::abs(at(i + 1, j) - at(i, j)) * dx1);
  for (int i = 0; i < m0; ++i)
    for (int j = 0; j + 1 < m1; ++j) s.add(std::abs(at(i, j + 1) - at(i, j)) * dx0);
  return s.sum;
}

double mass_integral(const GridState& state) {
  KahanSum s;
  for (double v : state.u) s.add(v);
  return s.sum * state.grid.cell_volume();
}

void state_minmax(const GridState& state, double& mn, double& mx) {
  mn = state.u[0];
  mx = state.u[0];
  for (double v : state.u) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
}

int quiet_boundary_margin(const GridState& state, double tol) {
  int margin = std::numeric_limits<int>::max();
  auto scan_line = [&](auto value_at, int len) {
    int lead = 0;
    while (lead + 1 < len && std::abs(value_at(lead + 1) - value_at(0)) <= tol)
      ++lead;
    int trail = 0;
    while (trail + 1 < len &&
           std::abs(value_at(len - 2 - trail) - value_at(len - 1)) <= tol)
      ++trail;
    margin = std::min(margin, std::min(lead, trail));
  };
  if (state.grid.dim() == 1) {
    scan_line([&](int i) { return state.u[static_cast<size_t>(i)]; },
              state.grid.axes[0].cells);
    return margin;
  }
  const int m0 = state.grid.axes[0].cells;
  const int m1 = state.grid.axes[1].cells;
  for (int j = 0; j < m1; ++j)
    scan_line(
        [&](int i) {
          return state.u[static_cast<size_t>(i) * static_cast<size_t>(m1) +
                         static_cast<size_t>(j)];
        },
        m0);
  for (int i = 0; i < m0; ++i)
    scan_line(
        [&](int j) {
          return state.u[static_cast<size_t>(i) * static_cast<size_t>(m1) +
                         static_cast<size_t>(j)];
        },
        m1);
  return margin;
}

namespace {

double mollify(double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; }

double down(double z) {  // 1 for z<=0, 0 for z>=1, smooth between
  if (z <= 0.0) return 1.0;
  if (z >= 1.0) return 0.0;
  const double a = mollify(z), b = mollify(1.0 - z);
  return b / (a + b);
}

// Smooth plateau supported strictly inside [lo, hi].
double plateau(double x, double lo, double hi) {
  const double L = hi - lo;
  const double rise = down((lo + 0.3 * L - x) / (0.2 * L));
  const double fall = down((x - (hi - 0.3 * L)) / (0.2 * L));
  return rise * fall;
}

}  // namespace

double entropy_residual(const std::vector<GridState>& snapshots,
                        const DriftModel& model, double k) {
  require(snapshots.size() >= 2, "entropy_residual requires stored snapshots");
  const Grid& grid = snapshots.front().grid;
  for (const GridState& s : snapshots)
    require(s.grid == grid, "entropy_residual requires one grid");
  const double t_end = snapshots.back().t;
  require(t_end > snapshots.front().t, "entropy_residual requires t_end > t0");

  // The discrete weak form mirrors the scheme itself: the entropy flux is the
  // same interface splitting evaluated at u-join-k and u-meet-k, the entropy
  // source pairs the same two interfaces, and the time part pairs the state
  // with backward differences of the profile. Summed against a nonnegative
  // profile vanishing at the final time this reproduces, cell by cell, the
  // inequality the update satisfies, so runs of this solver come out
  // nonnegative up to rounding (plus splitting error in dimension two), while
  // frozen constants cancel exactly.
  auto time_profile = [&](double t) { return down((t / t_end - 0.3) / 0.6); };

  const int dim = grid.dim();
  std::vector<std::vector<double>> beta(static_cast<size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    const GridAxis& ax = grid.axes[static_cast<size_t>(a)];
    beta[static_cast<size_t>(a)].resize(static_cast<size_t>(ax.cells) + 2, 0.0);
    for (int i = 0; i < ax.cells; ++i)
      beta[static_cast<size_t>(a)][static_cast<size_t>(i + 1)] =
          plateau(ax.center(i), ax.lo, ax.hi);
  }

  const double vol = grid.cell_volume();
  const size_t n_cells = grid.size();
  const int m1 = dim == 2 ? grid.axes[1].cells : 1;
  auto cell_index = [&](size_t idx, int* ix) {
    if (dim == 1) {
      ix[0] = static_cast<int>(idx);
    } else {
      ix[0] = static_cast<int>(idx) / m1;
      ix[1] = static_cast<int>(idx) % m1;
    }
  };
  auto phi_at = [&](const int* ix) {
    double v = 1.0;
    for (int a = 0; a < dim; ++a)
      v *= beta[static_cast<size_t>(a)][static_cast<size_t>(ix[a] + 1)];
    return v;
  };

  KahanSum res;
  // Time part: S(u^0) phi(t^0) + sum_n S(u^n)(phi(t^n) - phi(t^{n-1})).
  // Telescopes to S * phi(t_end) = 0 on constants.
  {
    const GridState& s0 = snapshots.front();
    const double tp = time_profile(s0.t);
    int ix[2];
    for (size_t i = 0; i < n_cells; ++i) {
      cell_index(i, ix);
      res.add(vol * std::abs(s0.u[i] - k) * tp * phi_at(ix));
    }
  }
  for (size_t n = 1; n < snapshots.size(); ++n) {
    const GridState& cur = snapshots[n];
    const double dtp = time_profile(cur.t) - time_profile(snapshots[n - 1].t);
    if (dtp == 0.0) continue;
    int ix[2];
    for (size_t i = 0; i < n_cells; ++i) {
      cell_index(i, ix);
      res.add(vol * std::abs(cur.u[i] - k) * dtp * phi_at(ix));
    }
  }

  // Space part per step, evaluated at the same half-step time the solver
  // uses. Only dimension 1 is needed below; dimension 2 sums per axis line.
  for (size_t n = 0; n + 1 < snapshots.size(); ++n) {
    const GridState& cur = snapshots[n];
    const double dt = snapshots[n + 1].t - cur.t;
    const double t_half = cur.t + 0.5 * dt;
    const double tp = time_profile(cur.t);
    if (tp == 0.0) continue;

    for (int a = 0; a < dim; ++a) {
      const GridAxis& ax = grid.axes[static_cast<size_t>(a)];
      const int M = ax.cells;
      const double dxa = ax.dx();
      size_t stride, n_lines, line_step;
      if (dim == 1) {
        stride = 1;
        n_lines = 1;
        line_step = 0;
      } else if (a == 0) {
        stride = static_cast<size_t>(m1);
        n_lines = static_cast<size_t>(m1);
        line_step = 1;
      } else {
        stride = 1;
        n_lines = static_cast<size_t>(grid.axes[0].cells);
        line_step = static_cast<size_t>(m1);
      }
      auto entropy_flux = [&](double x, double ul, double ur) {
        const double up_l = std::max(ul, k), dn_l = std::min(ul, k);
        const double up_r = std::max(ur, k), dn_r = std::min(ur, k);
        return model.antiderivative_pos(t_half, x, up_l) +
               model.antiderivative_neg(t_half, x, up_r) -
               (model.antiderivative_pos(t_half, x, dn_l) +
                model.antiderivative_neg(t_half, x, dn_r));
      };
      for (size_t line = 0; line < n_lines; ++line) {
        const size_t base = line * line_step;
        double trans = 1.0;  // profile factor of the other axis
        if (dim == 2) {
          const int other = a == 0 ? static_cast<int>(line)
                                   : static_cast<int>(line);
          trans = beta[static_cast<size_t>(1 - a)][static_cast<size_t>(other + 1)];
        }
        if (trans == 0.0) continue;
        const std::vector<double>& b = beta[static_cast<size_t>(a)];
        auto u_at = [&](int i) {
          const int c = std::min(std::max(i, 0), M - 1);
          return cur.u[base + stride * static_cast<size_t>(c)];
        };
        for (int i = 0; i < M; ++i) {
          const double ui = u_at(i);
          const double x_r = ax.interface_pos(i + 1);
          const double x_l = ax.interface_pos(i);
          const double qhat_r = entropy_flux(x_r, ui, u_at(i + 1));
          const double dphi =
              (b[static_cast<size_t>(i + 2)] - b[static_cast<size_t>(i + 1)]) / dxa;
          const double up = std::max(ui, k), dn = std::min(ui, k);
          const double hhat =
              ((model.antiderivative(t_half, x_r, up) -
                model.antiderivative(t_half, x_l, up)) -
               (model.antiderivative(t_half, x_r, dn) -
                model.antiderivative(t_half, x_l, dn))) /
              dxa;
          res.add(vol * dt * tp * trans *
                  (qhat_r * dphi + hhat * b[static_cast<size_t>(i + 1)]));
        }
      }
    }
  }
  return res.sum;
}

void write_state_csv(const GridState& state, const std::string& path) {
  std::vector<std::string> header;
  for (int a = 0; a < state.grid.dim(); ++a)
    header.push_back("x" + std::to_string(a));
  header.push_back("u");
  CsvWriter csv(path, header);
  if (state.grid.dim() == 1) {
    for (int i = 0; i < state.grid.axes[0].cells; ++i)
      csv.row({sci12(state.grid.axes[0].center(i)),
               sci12(state.u[static_cast<size_t>(i)])});
  } else {
    const int m1 = state.grid.axes[1].cells;
    for (int i = 0; i < state.grid.axes[0].cells; ++i)
      for (int j = 0; j < m1; ++j)
        csv.row({sci12(state.grid.axes[0].center(i)),
                 sci12(state.grid.axes[1].center(j)),
                 sci12(state.u[static_cast<size_t>(i) * static_cast<size_t>(m1) +
                               static_cast<size_t>(j)])});
  }
}

void write_state_binary(const GridState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  const char magic[8] = {'M', 'F', 'G', 'P', 'D', 'E', '1', '\0'};
  out.write(magic, 8);
  const uint32_t dim = static_cast<uint32_t>(state.grid.dim());
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  for (const GridAxis& a : state.grid.axes) {
    const uint32_t m = static_cast<uint32_t>(a.cells);
    out.write(reinterpret_cast<const char*>(&m), sizeof m);
  }
  out.write(reinterpret_cast<const char*>(&state.t), sizeof state.t);
  out.write(reinterpret_cast<const char*>(state.u.data()),
            static_cast<std::streamsize>(state.u.size() * sizeof(double)));
}

GridState read_state_binary(const std::string& path, const Grid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "MFGPDE1\0", 8) != 0)
    throw ConfigError("bad magic in state dump: " + path);
  uint32_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  if (dim != static_cast<uint32_t>(grid.dim()))
    throw ConfigError("state dump dimension mismatch");
  for (const GridAxis& a : grid.axes) {
    uint32_t m = 0;
    in.read(reinterpret_cast<char*>(&m), sizeof m);
    if (m != static_cast<uint32_t>(a.cells))
      throw ConfigError("state dump cell-count mismatch");
  }
  GridState st;
  st.grid = grid;
  in.read(reinterpret_cast<char*>(&st.t), sizeof st.t);
  st.u.resize(grid.size());
  in.read(reinterpret_cast<char*>(st.u.data()),
          static_cast<std::streamsize>(st.u.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated state dump: " + path);
  return st;
}

}  // namespace mfg
