#pragma once

// Errors, experimental orders of convergence and convergence studies.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cifv/errors.hpp"
#include "cifv/grid.hpp"
#include "cifv/problems.hpp"
#include "cifv/solver.hpp"

namespace cifv {

/// E = h^2 sum |u_ij - exact(x_i, y_j, T)| over interior cells.
inline double l1_error(const CellField& numeric, const SpaceTimeFunction& exact, double T) {
  const Grid& g = numeric.grid;
  double sum = 0.0;
  for (int j = 1; j <= g.M; ++j)
    for (int i = 1; i <= g.M; ++i) sum += std::abs(numeric(i, j) - exact(g.xc(i), g.yc(j), T));
  return g.h * g.h * sum;
}

/// log2(E_coarse / E_fine); empty when either error is not positive.
inline std::optional<double> eoc(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::nullopt;
  return std::log2(e_coarse / e_fine);
}

/// Quadrants I (x >= 0, y >= 0), II (x < 0, y >= 0), III (x < 0, y < 0),
/// IV (x >= 0, y < 0) of the cell centres.
enum class Quadrant { I = 0, II = 1, III = 2, IV = 3 };

inline Quadrant quadrant_of(double x, double y) {
  if (y >= 0.0) return x >= 0.0 ? Quadrant::I : Quadrant::II;
  return x < 0.0 ? Quadrant::III : Quadrant::IV;
}

inline std::array<double, 4> sector_errors(const CellField& numeric, const SpaceTimeFunction& exact, double T) {
  const Grid& g = numeric.grid;
  std::array<double, 4> e{};
  for (int j = 1; j <= g.M; ++j) {
    for (int i = 1; i <= g.M; ++i) {
      const double x = g.xc(i), y = g.yc(j);
      e[static_cast<int>(quadrant_of(x, y))] += std::abs(numeric(i, j) - exact(x, y, T));
    }
  }
  for (double& v : e) v *= g.h * g.h;
  return e;
}

/// Maps M to N: either N = M / divisor or a fixed N.
struct NRule {
  int divisor = 10;
  int fixed = 0;  ///< used when > 0

  int operator()(int M) const {
    if (fixed > 0) return fixed;
    if (M % divisor != 0) {
      throw ConfigError("N rule M/" + std::to_string(divisor) + " does not divide M=" + std::to_string(M));
    }
    return M / divisor;
  }

  std::string str() const { return fixed > 0 ? std::to_string(fixed) : "M/" + std::to_string(divisor); }

  /// Accepts "M/<k>" or a plain positive integer.
  static NRule parse(const std::string& text) {
    auto positive_int = [&](const std::string& s) {
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(s, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != s.size() || v <= 0) throw ConfigError("bad N rule '" + text + "'");
      return v;
    };
    if (text.size() > 2 && (text[0] == 'M' || text[0] == 'm') && text[1] == '/') {
      return NRule{positive_int(text.substr(2)), 0};
    }
    return NRule{1, positive_int(text)};
  }
};

struct ErrorReport {
  int M = 0;
  int N = 0;
  double E = 0.0;
  std::optional<double> eoc;
  double u_min = 0.0;  ///< over all computed steps
  double u_max = 0.0;
  double final_min = 0.0;  ///< at t = T
  double final_max = 0.0;
  double cmax_x = 0.0;
  double cmax_y = 0.0;
  double cmax = 0.0;
  bool linear = true;
  std::string method;
  int gs = 1;
  std::array<double, 4> sectors{};
  std::array<std::optional<double>, 4> sector_eoc{};
  double max_residual = 0.0;  ///< largest final-sweep residual over all steps
  double wall_seconds = 0.0;
};

/// Error report of a finished simulation; EOC columns are left empty.
inline ErrorReport make_report(const ProblemSpec& problem, const SimulationResult& sim, int N,
                               const MethodSpec& method, const SweepConfig& cfg) {
  if (!problem.has_exact()) throw ConfigError("problem '" + problem.name + "' has no exact solution");
  const int M = sim.solution.grid.M;
  ErrorReport r;
  r.M = M;
  r.N = N;
  r.E = l1_error(sim.solution, problem.exact, problem.final_time);
  r.sectors = sector_errors(sim.solution, problem.exact, problem.final_time);
  r.u_min = sim.u_min;
  r.u_max = sim.u_max;
  r.final_min = std::numeric_limits<double>::infinity();
  r.final_max = -r.final_min;
  for (int j = 1; j <= M; ++j) {
    for (int i = 1; i <= M; ++i) {
      r.final_min = std::min(r.final_min, sim.solution(i, j));
      r.final_max = std::max(r.final_max, sim.solution(i, j));
    }
  }
  r.linear = problem.is_linear();
  r.cmax_x = sim.courant.cmax_x;
  r.cmax_y = sim.courant.cmax_y;
  r.cmax = r.linear ? std::max(r.cmax_x, r.cmax_y) : sim.courant.cmax;
  r.method = method.label();
  r.gs = cfg.gs_passes;
  for (const auto& s : sim.reports) r.max_residual = std::max(r.max_residual, s.max_residual);
  return r;
}

/// Runs one resolution; EOC columns are left empty.
inline ErrorReport evaluate_run(const ProblemSpec& problem, int M, int N, const MethodSpec& method,
                                const SweepConfig& cfg, const StepObserver& observer = {}) {
  if (!problem.has_exact()) throw ConfigError("problem '" + problem.name + "' has no exact solution");
  const auto t0 = std::chrono::steady_clock::now();
  ErrorReport r = make_report(problem, run_simulation(problem, M, N, method, cfg, observer), N, method, cfg);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Fills EOC columns from consecutive rows.
inline void chain_eoc(std::vector<ErrorReport>& rows) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k == 0) {
      rows[k].eoc.reset();
      for (auto& e : rows[k].sector_eoc) e.reset();
      continue;
    }
    rows[k].eoc = eoc(rows[k - 1].E, rows[k].E);
    for (int q = 0; q < 4; ++q) rows[k].sector_eoc[q] = eoc(rows[k - 1].sectors[q], rows[k].sectors[q]);
  }
}

/// One run per entry of Ms, optionally in parallel, assembled in input order.
inline std::vector<ErrorReport> convergence_study(const ProblemSpec& problem, const MethodSpec& method,
                                                  const std::vector<int>& Ms, const NRule& rule,
                                                  const SweepConfig& cfg, bool parallel = false) {
  if (Ms.empty()) throw ConfigError("convergence study needs at least one resolution");
  for (std::size_t k = 1; k < Ms.size(); ++k) {
    if (Ms[k] != 2 * Ms[k - 1]) throw ConfigError("resolutions must double from row to row");
  }
  std::vector<ErrorReport> rows;
  if (parallel && Ms.size() > 1) {
    std::vector<std::future<ErrorReport>> jobs;
    for (int M : Ms) {
      jobs.push_back(std::async(std::launch::async, [&, M] { return evaluate_run(problem, M, rule(M), method, cfg); }));
    }
    for (auto& j : jobs) rows.push_back(j.get());
  } else {
    for (int M : Ms) rows.push_back(evaluate_run(problem, M, rule(M), method, cfg));
  }
  chain_eoc(rows);
  return rows;
}

inline std::string format_sig(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Full-precision CSV, header `M,N,E,EOC,min,max,Cmax_x,Cmax_y,Cmax,method,gs`.
inline void write_table_csv(std::ostream& os, const std::vector<ErrorReport>& rows) {
  os << "M,N,E,EOC,min,max,Cmax_x,Cmax_y,Cmax,method,gs\n";
  for (const auto& r : rows) {
    os << r.M << ',' << r.N << ',' << format_number(r.E) << ',' << (r.eoc ? format_number(*r.eoc) : "") << ','
       << format_number(r.u_min) << ',' << format_number(r.u_max) << ',' << format_number(r.cmax_x) << ','
       << format_number(r.cmax_y) << ',' << format_number(r.cmax) << ',' << r.method << ',' << r.gs << '\n';
  }
}

inline void write_sector_csv(std::ostream& os, const std::vector<ErrorReport>& rows) {
  os << "M,N,E_I,EOC_I,E_II,EOC_II,E_III,EOC_III,E_IV,EOC_IV\n";
  for (const auto& r : rows) {
    os << r.M << ',' << r.N;
    for (int q = 0; q < 4; ++q) {
      os << ',' << format_number(r.sectors[q]) << ',' << (r.sector_eoc[q] ? format_number(*r.sector_eoc[q]) : "");
    }
    os << '\n';
  }
}

/// Human-readable table: E to 5 significant figures, EOC to 2 decimals.
inline void print_table(std::ostream& os, const std::vector<ErrorReport>& rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%6s %5s %12s %6s %9s %9s %9s %9s %8s\n", "M", "N", "E", "EOC", "min", "max",
                "final_min", "final_max", "Cmax");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%6d %5d %12s %6s %9s %9s %9s %9s %8s\n", r.M, r.N, format_sig(r.E, 5).c_str(),
                  r.eoc ? format_fixed(*r.eoc, 2).c_str() : "-", format_fixed(r.u_min, 3).c_str(),
                  format_fixed(r.u_max, 3).c_str(), format_fixed(r.final_min, 3).c_str(),
                  format_fixed(r.final_max, 3).c_str(), format_fixed(r.cmax, 3).c_str());
    os << line;
  }
}

inline void print_sector_table(std::ostream& os, const std::vector<ErrorReport>& rows) {
  static const char* names[] = {"I", "II", "III", "IV"};
  char line[256];
  std::snprintf(line, sizeof line, "%6s %5s", "M", "N");
  os << line;
  for (const char* n : names) {
    std::snprintf(line, sizeof line, " %12s %6s", (std::string("E_") + n).c_str(), "EOC");
    os << line;
  }
  os << '\n';
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%6d %5d", r.M, r.N);
    os << line;
    for (int q = 0; q < 4; ++q) {
      std::snprintf(line, sizeof line, " %12s %6s", format_sig(r.sectors[q], 5).c_str(),
                    r.sector_eoc[q] ? format_fixed(*r.sector_eoc[q], 2).c_str() : "-");
      os << line;
    }
    os << '\n';
  }
}

}  // namespace cifv
