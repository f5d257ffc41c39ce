// Acceptance run: one PASS/FAIL line per criterion, reference values and
// tolerances pinned below. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cifv/cifv.hpp"

using namespace cifv;

namespace {

// ---- reference tables (errors at M = 40, 80, 160, 320 or M = 80, 160, 320) ----

using Col4 = std::array<double, 4>;
using Col3 = std::array<double, 3>;

const Col4 kGaussOmega0 = {0.06959, 0.02163, 0.00578, 0.00147};
const Col4 kGaussOmegaHalf = {0.03687, 0.01087, 0.00285, 0.00072};
const Col4 kGaussOmega1 = {0.02543, 0.00693, 0.00175, 0.00043};
const Col4 kGaussEno = {0.04917, 0.01594, 0.00491, 0.00136};
const Col4 kGaussWeno = {0.04513, 0.01604, 0.00472, 0.00125};
const Col4 kGaussFirst = {0.15530, 0.10447, 0.06366, 0.03600};

const Col4 kShapesEno4 = {0.48031, 0.32450, 0.18626, 0.10187};
const Col4 kShapesWeno4 = {0.45872, 0.30956, 0.18315, 0.10120};
const Col4 kShapesEno8 = {0.47765, 0.32022, 0.18285, 0.09987};
const Col4 kShapesWeno8 = {0.45959, 0.29833, 0.17129, 0.09414};

// sector errors at M = 80, 160, 320: {Gaussian, cone}
const std::array<Col3, 2> kSectorEno4 = {{{0.03482, 0.01985, 0.00924}, {0.04953, 0.02453, 0.00989}}};
const std::array<Col3, 2> kSectorWeno4 = {{{0.03345, 0.02041, 0.01008}, {0.05008, 0.02651, 0.01080}}};
const std::array<Col3, 2> kSectorEno8 = {{{0.03456, 0.01955, 0.00902}, {0.04850, 0.02371, 0.00960}}};
const std::array<Col3, 2> kSectorWeno8 = {{{0.04764, 0.01846, 0.00867}, {0.04600, 0.02277, 0.00937}}};

const Col3 kBurgersOmega0 = {0.0599, 0.0247, 0.0083};
const Col3 kBurgersOmegaHalf = {0.0516, 0.0209, 0.0069};
const Col3 kBurgersOmega1 = {0.0436, 0.0175, 0.0057};
const Col3 kBurgersEno = {0.0603, 0.0255, 0.0082};
const Col3 kBurgersWeno = {0.0590, 0.0250, 0.0080};

const Col3 kRareEno4 = {0.34522, 0.18866, 0.09926};
const Col3 kRareWeno4 = {0.33213, 0.17907, 0.09331};
const Col3 kRareEno8 = {0.33366, 0.18425, 0.09734};
const Col3 kRareWeno8 = {0.30509, 0.16846, 0.08890};

const Col3 kShockEno4 = {0.11936, 0.06354, 0.03547};
const Col3 kShockWeno4 = {0.11909, 0.06341, 0.03330};
const Col3 kShockEno8 = {0.12562, 0.06609, 0.03411};
const Col3 kShockWeno8 = {0.12392, 0.06534, 0.03377};

// ---- tolerances ----

constexpr double kTolFixed = 0.05;
constexpr double kTolLimited = 0.15;
constexpr double kTolFirstOrder = 0.05;
constexpr double kTolSector = 0.20;
constexpr double kEocFixedMin = 1.9;
constexpr double kEocLimitedMin = 1.8;
constexpr double kShapesEocLo = 0.5, kShapesEocHi = 0.95;
constexpr double kNonlinearEocLo = 0.8, kNonlinearEocHi = 1.0;
constexpr double kBurgersLimitedBound = 0.5;
constexpr double kBurgersFixedExcess = 0.01;
constexpr double kPNegTol = 1e-10;
constexpr double kHullTol = 1e-10;
constexpr double kConservationTol = 1e-10;
constexpr double kFirstOrderTol = 1e-13;
constexpr double kOneSweepTol = 1e-12;
constexpr double kConsistencyLo = 3.2, kConsistencyHi = 4.8;
constexpr double kOvershoot = 0.05;
constexpr double kLimitedOvershoot = 1e-8;

// ---- helpers ----

struct Series {
  std::vector<ErrorReport> rows;
  std::vector<CellField> fields;
};

Series run_series(const ProblemSpec& problem, const MethodSpec& m, const std::vector<int>& Ms, int divisor, int gs) {
  SweepConfig cfg;
  cfg.gs_passes = gs;
  Series s;
  for (int M : Ms) {
    const int N = M / divisor;
    const SimulationResult sim = run_simulation(problem, M, N, m, cfg);
    s.rows.push_back(make_report(problem, sim, N, m, cfg));
    s.fields.push_back(sim.solution);
  }
  chain_eoc(s.rows);
  return s;
}

std::string label(const MethodSpec& m, int gs) { return m.label() + (gs == 1 ? " 4GS" : " 8GS"); }

double rel(double got, double want) { return std::abs(got - want) / want; }

/// Compares every row with its reference and prints the row; returns false
/// on any miss.
template <std::size_t K>
bool compare_errors(const std::string& name, const Series& s, const std::array<double, K>& ref, double tol) {
  bool ok = true;
  for (std::size_t k = 0; k < K; ++k) {
    const ErrorReport& r = s.rows[k];
    const double d = rel(r.E, ref[k]);
    const bool pass = d <= tol;
    ok = ok && pass;
    std::printf("    %-22s M=%-4d E=%.5f ref=%.5f rel=%5.1f%% %s EOC=%s min=%.4f max=%.4f\n", name.c_str(), r.M, r.E,
                ref[k], 100.0 * d, pass ? "ok  " : "MISS", r.eoc ? format_fixed(*r.eoc, 2).c_str() : "-", r.u_min,
                r.u_max);
  }
  return ok;
}

bool eoc_in(const std::string& name, const Series& s, double lo, double hi, bool finest_only) {
  bool ok = true;
  for (std::size_t k = finest_only ? s.rows.size() - 1 : 1; k < s.rows.size(); ++k) {
    const auto& e = s.rows[k].eoc;
    const bool pass = e && *e >= lo && *e <= hi;
    ok = ok && pass;
    if (!pass) {
      std::printf("    %-22s EOC at M=%d is %s, outside [%g, %g]\n", name.c_str(), s.rows[k].M,
                  e ? format_fixed(*e, 3).c_str() : "-", lo, hi);
    }
  }
  return ok;
}

struct Criterion {
  int id;
  bool pass;
  std::string summary;
};

std::vector<Criterion> g_results;

void report(int id, bool pass, const std::string& summary, double seconds) {
  std::printf("criterion %d: %s  %s (%.0f s)\n", id, pass ? "PASS" : "FAIL", summary.c_str(), seconds);
  std::fflush(stdout);
  g_results.push_back({id, pass, summary});
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<int> kMs4 = {40, 80, 160, 320};
const std::vector<int> kMs3 = {80, 160, 320};

// ---- criteria ----

void criterion1() {
  const auto t0 = Clock::now();
  std::printf("criterion 1: rotating Gaussian, fixed omega, N = M/10, 4GS\n");
  const ProblemSpec p = preset_rotating_gaussian();
  bool ok = true;
  int misses = 0;
  const std::pair<double, const Col4*> cols[] = {{0.0, &kGaussOmega0}, {0.5, &kGaussOmegaHalf}, {1.0, &kGaussOmega1}};
  for (const auto& [omega, ref] : cols) {
    const MethodSpec m = MethodSpec::fixed(omega);
    const Series s = run_series(p, m, kMs4, 10, 1);
    const bool rows_ok = compare_errors(m.label(), s, *ref, kTolFixed);
    const bool eoc_ok = eoc_in(m.label(), s, kEocFixedMin, 1e9, true);
    for (std::size_t k = 0; k < 4; ++k) misses += rel(s.rows[k].E, (*ref)[k]) > kTolFixed;
    ok = ok && rows_ok && eoc_ok;
  }
  report(1, ok, "errors within 5% and finest EOC >= 1.9 (" + std::to_string(misses) + " of 12 rows outside)",
         since(t0));
}

void criterion2() {
  const auto t0 = Clock::now();
  std::printf("criterion 2: rotating Gaussian, ENO / WENO / first order, N = M/10, 4GS\n");
  const ProblemSpec p = preset_rotating_gaussian();
  const Series eno = run_series(p, MethodSpec::eno(), kMs4, 10, 1);
  const Series weno = run_series(p, MethodSpec::weno(), kMs4, 10, 1);
  const Series first = run_series(p, MethodSpec::first_order(), kMs4, 10, 1);
  bool ok = compare_errors("eno", eno, kGaussEno, kTolLimited);
  ok = compare_errors("weno", weno, kGaussWeno, kTolLimited) && ok;
  ok = eoc_in("eno", eno, kEocLimitedMin, 1e9, true) && ok;
  ok = eoc_in("weno", weno, kEocLimitedMin, 1e9, true) && ok;
  ok = compare_errors("first-order", first, kGaussFirst, kTolFirstOrder) && ok;
  report(2, ok, "ENO/WENO within 15% with finest EOC >= 1.8, first order within 5%", since(t0));
}

void criterion3() {
  const auto t0 = Clock::now();
  std::printf("criterion 3: rotating shapes, ENO/WENO, 4GS and 8GS, N = M/10\n");
  const ProblemSpec p = preset_rotating_shapes();
  // After a quarter turn the Gaussian sits in quadrant II and the cone in III.
  const int gauss_q = static_cast<int>(Quadrant::II), cone_q = static_cast<int>(Quadrant::III);
  struct Case {
    MethodSpec m;
    int gs;
    const Col4* whole;
    const std::array<Col3, 2>* sectors;
  };
  const Case cases[] = {{MethodSpec::eno(), 1, &kShapesEno4, &kSectorEno4},
                        {MethodSpec::weno(), 1, &kShapesWeno4, &kSectorWeno4},
                        {MethodSpec::eno(), 2, &kShapesEno8, &kSectorEno8},
                        {MethodSpec::weno(), 2, &kShapesWeno8, &kSectorWeno8}};
  bool ok = true;
  for (const Case& c : cases) {
    const std::string name = label(c.m, c.gs);
    const Series s = run_series(p, c.m, kMs4, 10, c.gs);
    ok = compare_errors(name, s, *c.whole, kTolLimited) && ok;
    ok = eoc_in(name, s, kShapesEocLo, kShapesEocHi, false) && ok;
    for (std::size_t k = 1; k < 4; ++k) {
      const double eg = s.rows[k].sectors[gauss_q], ec = s.rows[k].sectors[cone_q];
      const double rg = (*c.sectors)[0][k - 1], rc = (*c.sectors)[1][k - 1];
      const bool pass = rel(eg, rg) <= kTolSector && rel(ec, rc) <= kTolSector;
      ok = ok && pass;
      std::printf("    %-22s M=%-4d Gaussian sector %.5f (ref %.5f, %5.1f%%)  cone sector %.5f (ref %.5f, %5.1f%%) %s\n",
                  name.c_str(), s.rows[k].M, eg, rg, 100 * rel(eg, rg), ec, rc, 100 * rel(ec, rc),
                  pass ? "ok" : "MISS");
    }
  }
  report(3, ok, "whole-domain errors within 15%, every EOC in [0.5, 0.95], sector errors within 20%", since(t0));
}

void criterion4() {
  const auto t0 = Clock::now();
  std::printf("criterion 4: Burgers smooth, N = M/80, 4GS\n");
  const ProblemSpec p = preset_burgers_smooth();
  bool ok = true;
  const std::pair<double, const Col3*> cols[] = {
      {0.0, &kBurgersOmega0}, {0.5, &kBurgersOmegaHalf}, {1.0, &kBurgersOmega1}};
  for (const auto& [omega, ref] : cols) {
    const MethodSpec m = MethodSpec::fixed(omega);
    const Series s = run_series(p, m, kMs3, 80, 1);
    ok = compare_errors(m.label(), s, *ref, kTolLimited) && ok;
    // The table's min/max columns are final-time values; compare those and
    // show the extremes over all steps next to them.
    for (const auto& r : s.rows) {
      const bool pass = r.final_min >= -kBurgersLimitedBound - kBurgersFixedExcess &&
                        r.final_max <= kBurgersLimitedBound + kBurgersFixedExcess;
      ok = ok && pass;
      std::printf("    %-22s M=%-4d final min/max %.4f / %.4f, over all steps %.4f / %.4f %s\n", m.label().c_str(), r.M,
                  r.final_min, r.final_max, r.u_min, r.u_max, pass ? "ok" : "MISS");
    }
  }
  const std::pair<MethodSpec, const Col3*> limited[] = {{MethodSpec::eno(), &kBurgersEno},
                                                        {MethodSpec::weno(), &kBurgersWeno}};
  for (const auto& [m, ref] : limited) {
    const Series s = run_series(p, m, kMs3, 80, 1);
    ok = compare_errors(m.label(), s, *ref, kTolLimited) && ok;
    for (const auto& r : s.rows) {
      if (r.u_min < -kBurgersLimitedBound || r.u_max > kBurgersLimitedBound) {
        std::printf("    %s M=%d leaves [-0.5, 0.5]\n", m.label().c_str(), r.M);
        ok = false;
      }
    }
  }
  report(4, ok, "errors within 15%, ENO/WENO inside [-0.5, 0.5] at every step, fixed omega inside [-0.51, 0.51] at T", since(t0));
}

/// Position where a row of the field first drops through `level`, linearly
/// interpolated between cell centres; NaN when it never does.
double crossing(const CellField& f, int j, double level, double x_from) {
  const Grid& g = f.grid;
  for (int i = 2; i <= g.M; ++i) {
    if (g.xc(i) <= x_from) continue;
    const double a = f(i - 1, j), b = f(i, j);
    if (a > level && b <= level) return g.xc(i - 1) + (a - level) / (a - b) * g.h;
  }
  return std::nan("");
}

void criterion5() {
  const auto t0 = Clock::now();
  std::printf("criterion 5: rarefaction and shock, ENO/WENO, 4GS and 8GS, N = M/40\n");
  const ProblemSpec rare = preset_rarefaction();
  const ProblemSpec shock = preset_shock();
  // Rankine-Hugoniot speeds of Burgers' flux are the mean of the two states.
  const double s1 = (1.0 + 0.1) / 2.0, s2 = (0.1 + (-0.5)) / 2.0;
  const double T = shock.final_time;
  const double x1 = -0.8 + s1 * T, x2 = 0.2 + s2 * T;
  struct Case {
    MethodSpec m;
    int gs;
    const Col3* rare_ref;
    const Col3* shock_ref;
  };
  const Case cases[] = {{MethodSpec::eno(), 1, &kRareEno4, &kShockEno4},
                        {MethodSpec::weno(), 1, &kRareWeno4, &kShockWeno4},
                        {MethodSpec::eno(), 2, &kRareEno8, &kShockEno8},
                        {MethodSpec::weno(), 2, &kRareWeno8, &kShockWeno8}};
  bool ok = true;
  int position_misses = 0;
  for (const Case& c : cases) {
    const std::string name = label(c.m, c.gs);
    const Series r = run_series(rare, c.m, kMs3, 40, c.gs);
    ok = compare_errors("rarefaction " + name, r, *c.rare_ref, kTolLimited) && ok;
    ok = eoc_in("rarefaction " + name, r, kNonlinearEocLo, kNonlinearEocHi, false) && ok;
    const Series s = run_series(shock, c.m, kMs3, 40, c.gs);
    ok = compare_errors("shock " + name, s, *c.shock_ref, kTolLimited) && ok;
    ok = eoc_in("shock " + name, s, kNonlinearEocLo, kNonlinearEocHi, false) && ok;
    for (const CellField& f : s.fields) {
      // Row through y ~ 0.5, where both shocks run in the x direction.
      const int j = 3 * f.grid.M / 4;
      const double p1 = crossing(f, j, (1.0 + 0.1) / 2.0, -1.0);
      const double p2 = crossing(f, j, (0.1 - 0.5) / 2.0, p1);
      const bool pass = std::abs(p1 - x1) <= f.grid.h && std::abs(p2 - x2) <= f.grid.h;
      position_misses += !pass;
      std::printf("    shock %-16s M=%-4d y=%.4f  x1=%.4f (RH %.4f, %.2f h)  x2=%.4f (RH %.4f, %.2f h) %s\n",
                  name.c_str(), f.grid.M, f.grid.yc(j), p1, x1, std::abs(p1 - x1) / f.grid.h, p2, x2,
                  std::abs(p2 - x2) / f.grid.h, pass ? "ok" : "MISS");
    }
  }
  ok = ok && position_misses == 0;
  report(5, ok, "errors within 15%, EOC in [0.8, 1.0], shock positions within one cell", since(t0));
}

// (a) to (g)
void criterion6() {
  const auto t0 = Clock::now();
  std::printf("criterion 6: property suite\n");
  bool all = true;
  auto sub = [&](const char* tag, bool pass, const std::string& what) {
    std::printf("    (%s) %s %s\n", tag, pass ? "ok  " : "FAIL", what.c_str());
    all = all && pass;
  };

  {  // (a) min/max principle and P >= 0 on every step, converged sweeps
    int violations = 0, hull = 0, steps = 0;
    double min_p = 0.0, worst_res = 0.0;
    int violations_4gs = 0;
    for (const ProblemSpec& p : {preset_rotating_shapes(), preset_rotating_gaussian()}) {
      for (const MethodSpec& m : {MethodSpec::eno(), MethodSpec::weno()}) {
        for (int M : {40, 80, 160}) {
          for (int gs : {1, 2}) {
            SweepConfig cfg;
            cfg.gs_passes = gs;
            const Grid g = p.grid(M);
            const double tau = p.final_time / (M / 10);
            auto obs = [&](int, const CellField& U, const CellField& u, const ParamField& prm) {
              const PositivityReport r = diagnose_step(p, g, prm, tau);
              if (gs == 1) {
                violations_4gs += r.violations;
                return;
              }
              ++steps;
              violations += r.violations;
              min_p = std::min({min_p, r.min_self, r.min_neighbors});
              for (int j = 1; j <= M; ++j)
                for (int i = 1; i <= M; ++i) {
                  const double v[] = {u(i, j), U(i - 1, j), U(i + 1, j), U(i, j - 1), U(i, j + 1)};
                  const double lo = *std::min_element(std::begin(v), std::end(v));
                  const double hi = *std::max_element(std::begin(v), std::end(v));
                  hull += U(i, j) < lo - kHullTol || U(i, j) > hi + kHullTol;
                }
            };
            const SimulationResult sim = run_simulation(p, M, M / 10, m, cfg, obs);
            if (gs == 2)
              for (const auto& s : sim.reports) worst_res = std::max(worst_res, s.max_residual);
          }
        }
      }
    }
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "%d 8GS steps: %d P violations below -1e-10 (min P %.2e), %d cells outside the stencil hull, "
                  "largest residual %.1e; 4GS leaves %d violations from unconverged sweeps",
                  steps, violations, min_p, hull, worst_res, violations_4gs);
    sub("a", violations == 0 && hull == 0 && min_p >= -kPNegTol, buf);
  }

  {  // (b) incompressibility of the rotation field
    const ProblemSpec p = preset_rotating_gaussian();
    double worst = 0.0;
    for (int M : {40, 80, 160, 320, 640}) worst = std::max(worst, check_incompressibility(p, p.grid(M), 0.25 / (M / 10)));
    sub("b", worst == 0.0, "rotation incompressibility residual " + format_sig(worst, 3));
  }

  {  // (c) one sweep with the matched ordering solves constant-velocity advection
    double worst = 0.0;
    const struct {
      double v, w;
      int ordering;
    } cases[] = {{1.0, 0.5, 1}, {-1.0, 0.5, 2}, {-1.0, -0.5, 3}, {1.0, -0.5, 4}};
    for (const auto& c : cases) {
      ProblemSpec p;
      p.kind = ProblemKind::linear_advection;
      p.velocity = [c](double, double) { return Velocity{c.v, c.w}; };
      p.initial = [](double x, double y) { return std::exp(-8.0 * (x * x + y * y)); };
      p.exact = [c, f = p.initial](double x, double y, double t) { return f(x - c.v * t, y - c.w * t); };
      const Grid g = make_grid(-1, 1, -1, 1, 32);
      const double tau = 0.2;
      const CellField u = fill_from_function(g, p.initial, 0.0);
      for (double om : {0.0, 0.5, 1.0}) {
        CellField U = u;
        fill_ghosts_dirichlet(U, p.exact, tau);
        const ParamField prm(g, om, 1.0);
        const ImplicitSolver solver(p, g, tau);
        solver.sweep_once(U, u, prm, c.ordering);
        worst = std::max(worst, solver.max_residual(U, u, prm));
      }
    }
    sub("c", worst < kOneSweepTol, "largest residual after one matched sweep " + format_sig(worst, 3));
  }

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
  auto random_field = [&](const Grid& g) {
    CellField f(g);
    for (double& v : f.data.raw()) v = sym(rng);
    return f;
  };
  auto random_params = [&](const Grid& g) {
    ParamField prm(g, 0.0, 0.0);
    for (Side s : kAllSides) {
      for (double& v : prm[s].omega.raw()) v = unit(rng);
      for (double& v : prm[s].ell.raw()) v = unit(rng);
    }
    return prm;
  };

  {  // (d) the "-" states of a cell do not read U(i+1,j) or U(i,j+1)
    const Grid g = make_grid(-1, 1, -1, 1, 16);
    const CellField u = random_field(g);
    CellField U = random_field(g);
    const ParamField prm = random_params(g);
    double coupling = 0.0;
    for (int j = 1; j <= 16; ++j)
      for (int i = 1; i <= 16; ++i) {
        const CellStencil base = gather_stencil(U, u, prm, i, j);
        for (auto [a, b] : {std::pair{i + 1, j}, std::pair{i, j + 1}}) {
          const double keep = U(a, b);
          U(a, b) += 1.0;
          const CellStencil probe = gather_stencil(U, u, prm, i, j);
          U(a, b) = keep;
          coupling = std::max({coupling, std::abs(probe.east_minus.slope - base.east_minus.slope),
                               std::abs(probe.east_minus.offset - base.east_minus.offset),
                               std::abs(probe.north_minus.slope - base.north_minus.slope),
                               std::abs(probe.north_minus.offset - base.north_minus.offset)});
        }
      }
    sub("d", coupling == 0.0, "coupling of the owned \"-\" states to U(i+1,j), U(i,j+1): " + format_sig(coupling, 3));
  }

  {  // (e) mass conservation with zero boundary flux
    ProblemSpec p = preset_rotating_shapes();
    p.velocity = [](double x, double y) {
      const double two_pi = 2.0 * presets::kPi;
      return Velocity{-two_pi * y * std::max(0.0, 1.0 - x * x), two_pi * x * std::max(0.0, 1.0 - y * y)};
    };
    p.initial = [](double x, double y) {
      const double d = std::sqrt((x + 0.5) * (x + 0.5) + (y - 0.5) * (y - 0.5));
      return d <= 0.25 ? 1.0 - d / 0.25 : 0.0;
    };
    p.exact = [](double, double, double) { return 0.0; };
    auto mass = [](const CellField& f) {
      double s = 0.0;
      for (int j = 1; j <= f.grid.M; ++j)
        for (int i = 1; i <= f.grid.M; ++i) s += f(i, j);
      return s * f.grid.h * f.grid.h;
    };
    double worst = 0.0;
    const double m0 = mass(fill_from_function(p.grid(40), p.initial));
    for (const MethodSpec& m : {MethodSpec::first_order(), MethodSpec::fixed(0.5), MethodSpec::eno(), MethodSpec::weno()}) {
      SweepConfig cfg;
      cfg.gs_passes = 3;
      worst = std::max(worst, std::abs(mass(run_simulation(p, 40, 4, m, cfg).solution) - m0));
    }
    sub("e", worst <= kConservationTol, "largest change of sum u h^2 " + format_sig(worst, 3));
  }

  {  // (f) ell = 0 is the first-order upwind scheme
    const ProblemSpec p = preset_rotating_gaussian();
    const Grid g = p.grid(24);
    const double tau = 0.02, k = tau / g.h;
    const EdgeVelocities e = sample_edge_velocities(g, p.velocity);
    auto upwind = [&](const CellField& U, const CellField& u, int i, int j) {
      auto f = [](double vel, double l, double r) { return std::max(vel, 0.0) * l + std::min(vel, 0.0) * r; };
      return U(i, j) - u(i, j) + k * (f(e.vx(i, j), U(i, j), U(i + 1, j)) - f(e.vx(i - 1, j), U(i - 1, j), U(i, j))) +
             k * (f(e.wy(i, j), U(i, j), U(i, j + 1)) - f(e.wy(i, j - 1), U(i, j - 1), U(i, j)));
    };
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const CellField U = random_field(g), u = random_field(g);
      ParamField prm = random_params(g);
      for (Side s : kAllSides) prm[s].ell.fill(0.0);
      for (int j = 1; j <= g.M; ++j)
        for (int i = 1; i <= g.M; ++i)
          worst = std::max(worst, std::abs(cell_residual_advection(U, u, prm, e, tau, i, j) - upwind(U, u, i, j)));
    }
    // A limited step whose ell all vanish: constant data.
    const CellField flat(g, 0.7);
    CellField U = flat;
    fill_ghosts_dirichlet(U, [](double, double, double) { return 0.7; }, tau);
    const StepResult st = ImplicitSolver(p, g, tau).step(U, flat, MethodSpec::eno());
    double ell_max = 0.0;
    for (Side s : kAllSides) {
      const CellRange rg = param_range(g, s);
      for (int j = rg.j0; j <= rg.j1; ++j)
        for (int i = rg.i0; i <= rg.i1; ++i) ell_max = std::max(ell_max, st.params[s].ell(i, j));
    }
    for (int j = 1; j <= g.M; ++j)
      for (int i = 1; i <= g.M; ++i) worst = std::max(worst, std::abs(U(i, j) - 0.7));
    sub("f", worst <= kFirstOrderTol && ell_max == 0.0,
        "largest difference to the independent first-order scheme " + format_sig(worst, 3));
  }

  {  // (g) truncation error ratio under h, tau halving
    const ProblemSpec p = preset_rotating_gaussian();
    auto truncation = [&](int M, double omega) {
      const Grid g = p.grid(M);
      const double tau = 0.5 * g.h, t0 = 0.05;
      CellField u(g), U(g);
      for (int j = g.first_padded(); j <= g.last_padded(); ++j)
        for (int i = g.first_padded(); i <= g.last_padded(); ++i) {
          u(i, j) = p.exact(g.xc(i), g.yc(j), t0);
          U(i, j) = p.exact(g.xc(i), g.yc(j), t0 + tau);
        }
      const ParamField prm(g, omega, 1.0);
      const EdgeVelocities e = sample_edge_velocities(g, p.velocity);
      double sum = 0.0;
      for (int j = 1; j <= M; ++j)
        for (int i = 1; i <= M; ++i) sum += std::abs(cell_residual_advection(U, u, prm, e, tau, i, j));
      return sum * g.h * g.h / tau;
    };
    bool ok = true;
    std::string text = "ratios";
    for (double omega : {0.0, 0.5, 1.0}) {
      const double ratio = truncation(320, omega) / truncation(640, omega);
      ok = ok && ratio >= kConsistencyLo && ratio <= kConsistencyHi;
      text += " omega=" + format_sig(omega, 2) + ": " + format_fixed(ratio, 3);
    }
    sub("g", ok, text + " (M 320 to 640)");
  }
  report(6, all, "property suite (a) to (g)", since(t0));
}

void criterion7() {
  const auto t0 = Clock::now();
  std::printf("criterion 7: oscillation witness, rotating shapes, M=64, N=10\n");
  const ProblemSpec p = preset_rotating_shapes();
  const int M = 64, N = 10;
  SweepConfig cfg;
  cfg.gs_passes = 2;
  bool ok = true;
  for (const MethodSpec& m : {MethodSpec::fixed(0.0), MethodSpec::fixed(1.0), MethodSpec::eno(), MethodSpec::weno()}) {
    const SimulationResult sim = run_simulation(p, M, N, m, cfg);
    const bool limited = m.kind == Method::eno || m.kind == Method::weno;
    const bool pass = limited ? sim.u_max <= 1.0 + kLimitedOvershoot : sim.u_max > 1.0 + kOvershoot;
    ok = ok && pass;
    std::printf("    %-16s Courant %.3f  max u %.6f  min u %.6f %s\n", m.label().c_str(), sim.courant.cmax_x,
                sim.u_max, sim.u_min, pass ? "ok" : "MISS");
  }
  report(7, ok, "fixed omega overshoots by more than 0.05, ENO/WENO stay below 1 + 1e-8", since(t0));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7};
  for (const auto& c : all) {
    try {
      c();
    } catch (const std::exception& e) {
      report(static_cast<int>(g_results.size()) + 1, false, std::string("exception: ") + e.what(), 0.0);
    }
  }
  std::printf("\nsummary (%.0f s total)\n", since(t0));
  int failed = 0;
  for (const auto& r : g_results) {
    std::printf("criterion %d: %s\n", r.id, r.pass ? "PASS" : "FAIL");
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
