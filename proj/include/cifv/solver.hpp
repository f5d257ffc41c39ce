#pragma once

// Fast sweeping Gauss-Seidel for the compact implicit scheme and the time
// step drivers: first order, fixed omega, and the ENO / WENO
// predictor-corrector procedures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cifv/errors.hpp"
#include "cifv/grid.hpp"
#include "cifv/limiters.hpp"
#include "cifv/problems.hpp"
#include "cifv/scheme.hpp"

namespace cifv {

enum class Method { first_order, fixed_omega, eno, weno };

struct MethodSpec {
  Method kind = Method::first_order;
  double omega = 0.0;              ///< fixed_omega only
  double omega_bar = 1.0 / 3.0;    ///< weno only
  double epsilon = 1e-6;           ///< weno only

  static MethodSpec first_order() { return {Method::first_order}; }
  static MethodSpec fixed(double omega) { return {Method::fixed_omega, omega}; }
  static MethodSpec eno() { return {Method::eno}; }
  static MethodSpec weno(double omega_bar = 1.0 / 3.0, double epsilon = 1e-6) {
    return {Method::weno, 0.0, omega_bar, epsilon};
  }

  std::string label() const {
    switch (kind) {
      case Method::first_order: return "first-order";
      case Method::fixed_omega: {
        std::ostringstream os;
        os << "fixed-omega(" << omega << ")";
        return os.str();
      }
      case Method::eno: return "eno";
      case Method::weno: return "weno";
    }
    return "?";
  }
};

enum class BoundaryMode { exact, frozen };

/// When the corrector refreshes r, omega and ell.
///  per_cell:  the sides touching a cell are refreshed as it is solved, with
///             the cell's own sides following its unknown (default).
///  per_sweep: once over the whole grid before every sweep.
///  predictor: once per corrector pass from the values it starts from, then
///             held through all of its sweeps.
enum class ParamUpdate { per_cell, per_sweep, predictor };

inline const char* param_update_name(ParamUpdate u) {
  switch (u) {
    case ParamUpdate::per_cell: return "per-cell";
    case ParamUpdate::per_sweep: return "per-sweep";
    case ParamUpdate::predictor: return "predictor";
  }
  return "?";
}

struct SweepConfig {
  int gs_passes = 1;          ///< full 4-sweep cycles per solve phase (1 = 4GS, 2 = 8GS)
  int corrector_passes = 1;   ///< repetitions of the corrector
  double cell_tol = 1e-12;    ///< per-cell nonlinear residual tolerance
  int cell_max_iter = 30;     ///< Newton cap before pure bisection
  BoundaryMode boundary = BoundaryMode::exact;
  ParamUpdate update = ParamUpdate::per_cell;

  void validate() const {
    if (gs_passes < 1) throw ConfigError("gs_passes must be >= 1");
    if (corrector_passes < 0) throw ConfigError("corrector_passes must be >= 0");
    if (!(cell_tol > 0.0)) throw ConfigError("cell_tol must be positive");
    if (cell_max_iter < 1) throw ConfigError("cell_max_iter must be >= 1");
  }
};

struct StepReport {
  int sweeps = 0;
  double max_residual = 0.0;
  long newton_iterations = 0;
  int max_newton_iterations = 0;
  long bisection_fallbacks = 0;
  double wall_seconds = 0.0;
};

struct StepResult {
  ParamField params;
  StepReport report;
};

namespace detail {

/// Root of an increasing scalar function by safeguarded Newton with a
/// central-difference derivative, then bisection.
template <class Residual>
double solve_increasing(const Residual& R, double guess, double lo, double hi, const SweepConfig& cfg,
                        StepReport& rep, int i, int j) {
  double a = lo, b = hi;
  double Ra = R(a), Rb = R(b);
  for (int e = 0; e < 60 && Ra > 0.0; ++e) {
    a -= (b - a);
    Ra = R(a);
  }
  for (int e = 0; e < 60 && Rb < 0.0; ++e) {
    b += (b - a);
    Rb = R(b);
  }
  if (!(Ra <= 0.0 && Rb >= 0.0)) {
    std::ostringstream os;
    os << "cell (" << i << "," << j << "): no sign change on bracket [" << a << "," << b << "]";
    throw SolverError(os.str());
  }
  double x = std::clamp(guess, a, b);
  int it = 0;
  for (; it < cfg.cell_max_iter; ++it) {
    const double Rx = R(x);
    if (std::abs(Rx) <= cfg.cell_tol) {
      rep.newton_iterations += it;
      rep.max_newton_iterations = std::max(rep.max_newton_iterations, it);
      return x;
    }
    if (Rx < 0.0) a = x; else b = x;
    const double delta = 1e-7 * std::max(1.0, std::abs(x));
    const double d = (R(x + delta) - R(x - delta)) / (2.0 * delta);
    double xn = x - Rx / d;
    if (!(d > 0.0) || !(xn > a && xn < b)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) <= cfg.cell_tol * std::max(1.0, std::abs(x))) {
      rep.newton_iterations += it + 1;
      rep.max_newton_iterations = std::max(rep.max_newton_iterations, it + 1);
      return xn;
    }
    x = xn;
  }
  rep.newton_iterations += it;
  rep.max_newton_iterations = std::max(rep.max_newton_iterations, it);
  ++rep.bisection_fallbacks;
  for (int k = 0; k < 400; ++k) {
    const double m = 0.5 * (a + b);
    const double Rm = R(m);
    if (std::abs(Rm) <= cfg.cell_tol || b - a <= cfg.cell_tol * std::max(1.0, std::abs(m))) return m;
    if (Rm < 0.0) a = m; else b = m;
  }
  std::ostringstream os;
  os << "cell (" << i << "," << j << "): nonlinear solve did not converge on [" << a << "," << b << "]";
  throw SolverError(os.str());
}

inline std::pair<double, double> stencil_bounds(const CellStencil& s, double u_new) {
  const double vals[] = {s.u_old, u_new, s.east_plus, s.west_minus, s.north_plus, s.south_minus};
  const auto [mn, mx] = std::minmax_element(std::begin(vals), std::end(vals));
  return {*mn - 1.0, *mx + 1.0};
}

}  // namespace detail

/// Sweep orderings 1..4: (i up, j up), (i down, j up), (i down, j down),
/// (i up, j down). Within a sweep j is the outer index.
class ImplicitSolver {
 public:
  ImplicitSolver(const ProblemSpec& problem, const Grid& grid, double tau, SweepConfig cfg = {})
      : problem_(problem), grid_(grid), tau_(tau), k_(tau / grid.h), cfg_(cfg) {
    cfg_.validate();
    if (!(tau > 0.0)) throw ConfigError("time step must be positive");
    if (problem.is_linear()) {
      if (!problem.velocity) throw ConfigError("linear advection problem without velocity field");
      edges_ = sample_edge_velocities(grid, problem.velocity);
      courant_ = compute_courant(problem, grid, tau);
    }
  }

  const Grid& grid() const { return grid_; }
  double tau() const { return tau_; }
  const SweepConfig& config() const { return cfg_; }
  const ProblemSpec& problem() const { return problem_; }
  const EdgeVelocities& edges() const { return edges_; }

  /// Courant data for the current pair of levels. Linear problems return the
  /// fixed per-cell data; conservation laws use the value range of U and u.
  CourantData courant(const CellField& U, const CellField& u) const {
    if (problem_.is_linear()) return courant_;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const CellField* f : {&U, &u}) {
      for (double v : f->data.raw()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    return compute_courant(problem_, grid_, tau_, std::pair{lo, hi});
  }

  /// Solves the equation of cell (i,j) for U(i,j), all other values fixed.
  double solve_cell(const CellField& U, const CellField& u, const ParamField& p, int i, int j,
                    StepReport& rep) const {
    const CellStencil s = gather_stencil(U, u, p, i, j);
    if (problem_.is_linear()) {
      const Affine r = advection_residual_affine(s, cell_velocities(edges_, i, j), k_);
      return -r.offset / r.slope;
    }
    return std::visit(
        [&](const auto& f, const auto& g) {
          auto R = [&](double x) { return conservation_residual(s, f, g, k_, x); };
          const auto [lo, hi] = detail::stencil_bounds(s, U(i, j));
          return detail::solve_increasing(R, U(i, j), lo, hi, cfg_, rep, i, j);
        },
        problem_.flux_f, problem_.flux_g);
  }

  void sweep_once(CellField& U, const CellField& u, const ParamField& p, int ordering, StepReport& rep) const {
    const int M = grid_.M;
    const bool i_up = ordering == 1 || ordering == 4;
    const bool j_up = ordering == 1 || ordering == 2;
    if (ordering < 1 || ordering > 4) throw ConfigError("sweep ordering must be 1..4");
    for (int jj = 1; jj <= M; ++jj) {
      const int j = j_up ? jj : M + 1 - jj;
      for (int ii = 1; ii <= M; ++ii) {
        const int i = i_up ? ii : M + 1 - ii;
        const double v = solve_cell(U, u, p, i, j, rep);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "cell (" << i << "," << j << "): non-finite update";
          throw SolverError(os.str());
        }
        U(i, j) = v;
      }
    }
    ++rep.sweeps;
  }

  void sweep_once(CellField& U, const CellField& u, const ParamField& p, int ordering) const {
    StepReport rep;
    sweep_once(U, u, p, ordering, rep);
  }

  double cell_residual(const CellField& U, const CellField& u, const ParamField& p, int i, int j) const {
    if (problem_.is_linear()) return cell_residual_advection(U, u, p, edges_, tau_, i, j);
    return std::visit(
        [&](const auto& f, const auto& g) {
          return conservation_residual(gather_stencil(U, u, p, i, j), f, g, k_, U(i, j));
        },
        problem_.flux_f, problem_.flux_g);
  }

  double max_residual(const CellField& U, const CellField& u, const ParamField& p) const {
    double m = 0.0;
    for (int j = 1; j <= grid_.M; ++j)
      for (int i = 1; i <= grid_.M; ++i) m = std::max(m, std::abs(cell_residual(U, u, p, i, j)));
    return m;
  }

  /// 4 * gs_passes sweeps with fixed parameters.
  void fixed_sweeps(CellField& U, const CellField& u, const ParamField& p, StepReport& rep) const {
    for (int pass = 0; pass < cfg_.gs_passes; ++pass)
      for (int ord = 1; ord <= 4; ++ord) sweep_once(U, u, p, ord, rep);
  }

  /// Recomputes r, omega and ell of one side of one cell from the current
  /// values, with the upstream ell taken as stored.
  void refresh_side(const CellField& U, const CellField& u, const MethodSpec& m, const CourantData& c,
                    ParamField& p, Side s, int i, int j) const {
    const CellRange rg = param_range(grid_, s);
    if (i < rg.i0 || i > rg.i1 || j < rg.j0 || j > rg.j1) return;
    int iu = i, ju = j;
    switch (s) {
      case Side::x_minus: --iu; break;
      case Side::x_plus: ++iu; break;
      case Side::y_minus: --ju; break;
      case Side::y_plus: ++ju; break;
    }
    auto& sp = p[s];
    const RatioParts q = ratio_parts(U, u, s, i, j);
    const double r = safe_ratio(q.num, q.den);
    const double om = m.kind == Method::eno ? eno_select(r) : weno_weight(q.num, q.den, m.omega_bar, m.epsilon);
    const bool inside = iu >= rg.i0 && iu <= rg.i1 && ju >= rg.j0 && ju <= rg.j1;
    sp.r(i, j) = r;
    sp.omega(i, j) = om;
    sp.ell(i, j) = limit_ell(om, r, c.local(i, j), inside ? sp.ell(iu, ju) : 0.0, inside ? sp.omega(iu, ju) : 0.0,
                             inside ? sp.r(iu, ju) : 1.0);
  }

  /// Corrector sweep. Before cell (i,j) is solved the facing sides of its
  /// neighbours are refreshed; its own four sides depend on the unknown
  /// through r and are recomputed inside the scalar solve, so the parameters
  /// in the accepted equation match the accepted value.
  void corrector_sweep(CellField& U, const CellField& u, const MethodSpec& m, ParamField& p, int ordering,
                       StepReport& rep) const {
    const CourantData c = courant(U, u);
    const int M = grid_.M;
    const bool i_up = ordering == 1 || ordering == 4;
    const bool j_up = ordering == 1 || ordering == 2;
    for (int jj = 1; jj <= M; ++jj) {
      const int j = j_up ? jj : M + 1 - jj;
      for (int ii = 1; ii <= M; ++ii) {
        const int i = i_up ? ii : M + 1 - ii;
        refresh_side(U, u, m, c, p, Side::x_minus, i - 1, j);
        refresh_side(U, u, m, c, p, Side::x_plus, i + 1, j);
        refresh_side(U, u, m, c, p, Side::y_minus, i, j - 1);
        refresh_side(U, u, m, c, p, Side::y_plus, i, j + 1);
        auto R = [&](double x) {
          U(i, j) = x;
          for (Side s : kAllSides) refresh_side(U, u, m, c, p, s, i, j);
          return cell_residual(U, u, p, i, j);
        };
        const double vals[] = {u(i, j), U(i - 1, j), U(i + 1, j), U(i, j - 1), U(i, j + 1)};
        const auto [mn, mx] = std::minmax_element(std::begin(vals), std::end(vals));
        const double pad = 1e-12 * std::max(1.0, std::max(std::abs(*mn), std::abs(*mx)));
        const double guess = U(i, j);
        const double v = detail::solve_increasing(R, guess, *mn - pad, *mx + pad, cfg_, rep, i, j);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "cell (" << i << "," << j << "): non-finite update";
          throw SolverError(os.str());
        }
        R(v);
      }
    }
    ++rep.sweeps;
  }

  /// Recomputes r, omega and ell from the current iterate.
  void update_parameters(const CellField& U, const CellField& u, const MethodSpec& m, ParamField& p) const {
    compute_ratios(U, u, p);
    if (m.kind == Method::eno) {
      eno_weights(p);
    } else {
      weno_weights(U, u, m.omega_bar, m.epsilon, p);
    }
    compute_ell(p, courant(U, u));
  }

  StepResult step(CellField& U, const CellField& u, const MethodSpec& m) const {
    const auto t0 = std::chrono::steady_clock::now();
    StepResult res;
    StepReport& rep = res.report;
    switch (m.kind) {
      case Method::first_order:
        res.params = ParamField(grid_, 0.0, 0.0);
        fixed_sweeps(U, u, res.params, rep);
        break;
      case Method::fixed_omega:
        if (!(m.omega >= 0.0 && m.omega <= 1.0)) throw ConfigError("omega must lie in [0,1]");
        res.params = ParamField(grid_, m.omega, 1.0);
        fixed_sweeps(U, u, res.params, rep);
        break;
      case Method::eno:
      case Method::weno: {
        if (m.kind == Method::weno) {
          if (!(m.omega_bar > 0.0 && m.omega_bar < 1.0)) throw ConfigError("omega_bar must lie in (0,1)");
          if (!(m.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
        }
        const double omega0 = m.kind == Method::eno ? 0.0 : m.omega_bar;
        res.params = ParamField(grid_, omega0, 1.0);
        fixed_sweeps(U, u, res.params, rep);
        for (int c = 0; c < cfg_.corrector_passes; ++c) {
          for (int pass = 0; pass < cfg_.gs_passes; ++pass) {
            for (int ord = 1; ord <= 4; ++ord) {
              if (cfg_.update != ParamUpdate::predictor || (pass == 0 && ord == 1)) {
                update_parameters(U, u, m, res.params);
              }
              if (cfg_.update == ParamUpdate::per_cell) {
                corrector_sweep(U, u, m, res.params, ord, rep);
              } else {
                sweep_once(U, u, res.params, ord, rep);
              }
            }
          }
        }
        break;
      }
    }
    rep.max_residual = max_residual(U, u, res.params);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

 private:
  ProblemSpec problem_;
  Grid grid_;
  double tau_;
  double k_;
  SweepConfig cfg_;
  EdgeVelocities edges_;
  CourantData courant_;
};

// Free-function entry points. U carries the initial guess for level n+1 and
// must have its ghost cells filled for t^{n+1}.

inline void sweep_once(CellField& U, const CellField& u, const ParamField& p, int ordering,
                       const ProblemSpec& problem, double tau, const SweepConfig& cfg = {}) {
  ImplicitSolver(problem, U.grid, tau, cfg).sweep_once(U, u, p, ordering);
}

inline StepResult solve_first_order_step(CellField& U, const CellField& u, const ProblemSpec& problem, double tau,
                                         const SweepConfig& cfg = {}) {
  return ImplicitSolver(problem, U.grid, tau, cfg).step(U, u, MethodSpec::first_order());
}

inline StepResult solve_fixed_omega_step(CellField& U, const CellField& u, const ProblemSpec& problem, double tau,
                                         double omega, const SweepConfig& cfg = {}) {
  return ImplicitSolver(problem, U.grid, tau, cfg).step(U, u, MethodSpec::fixed(omega));
}

inline StepResult solve_eno_step(CellField& U, const CellField& u, const ProblemSpec& problem, double tau,
                                 const SweepConfig& cfg = {}) {
  return ImplicitSolver(problem, U.grid, tau, cfg).step(U, u, MethodSpec::eno());
}

inline StepResult solve_weno_step(CellField& U, const CellField& u, const ProblemSpec& problem, double tau,
                                  double omega_bar, double epsilon, const SweepConfig& cfg = {}) {
  return ImplicitSolver(problem, U.grid, tau, cfg).step(U, u, MethodSpec::weno(omega_bar, epsilon));
}

struct SimulationResult {
  CellField solution;
  ParamField params;  ///< parameters of the final step
  std::vector<StepReport> reports;
  double u_min = 0.0;    ///< over all computed steps, interior cells
  double u_max = 0.0;
  double abs_max = 0.0;  ///< max |u| over all levels including t = 0
  CourantData courant;   ///< linear: fixed data; nonlinear: from [-abs_max, abs_max]
};

/// Called after every step with the step index (1..N), the new level, the
/// level it was computed from, and the parameters used.
using StepObserver = std::function<void(int, const CellField&, const CellField&, const ParamField&)>;

inline SimulationResult run_simulation(const ProblemSpec& problem, int M, int N, const MethodSpec& method,
                                       const SweepConfig& cfg = {}, const StepObserver& observer = {}) {
  if (N < 1) throw ConfigError("number of time steps must be >= 1");
  if (cfg.boundary == BoundaryMode::exact && !problem.has_exact()) {
    throw ConfigError("problem '" + problem.name + "' has no exact solution for Dirichlet-exact boundaries");
  }
  const Grid grid = problem.grid(M);
  const double tau = problem.final_time / N;
  const ImplicitSolver solver(problem, grid, tau, cfg);

  CellField u = fill_from_function(grid, problem.initial, 0.0);
  if (cfg.boundary == BoundaryMode::exact) fill_ghosts_dirichlet(u, problem.exact, 0.0);

  SimulationResult out;
  out.u_min = std::numeric_limits<double>::infinity();
  out.u_max = -out.u_min;
  for (int j = 1; j <= M; ++j)
    for (int i = 1; i <= M; ++i) out.abs_max = std::max(out.abs_max, std::abs(u(i, j)));

  for (int n = 0; n < N; ++n) {
    const double t_next = (n + 1) * tau;
    CellField U = u;
    U.time = t_next;
    if (cfg.boundary == BoundaryMode::exact) fill_ghosts_dirichlet(U, problem.exact, t_next);
    StepResult sr = solver.step(U, u, method);
    if (!all_finite(U)) throw SolverError("non-finite values after step " + std::to_string(n + 1));
    for (int j = 1; j <= M; ++j) {
      for (int i = 1; i <= M; ++i) {
        out.u_min = std::min(out.u_min, U(i, j));
        out.u_max = std::max(out.u_max, U(i, j));
        out.abs_max = std::max(out.abs_max, std::abs(U(i, j)));
      }
    }
    out.reports.push_back(sr.report);
    if (observer) observer(n + 1, U, u, sr.params);
    out.params = std::move(sr.params);
    u = std::move(U);
  }
  out.solution = std::move(u);
  out.courant = problem.is_linear() ? compute_courant(problem, grid, tau)
                                    : compute_courant(problem, grid, tau, std::pair{-out.abs_max, out.abs_max});
  return out;
}

}  // namespace cifv
