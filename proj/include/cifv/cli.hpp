#pragma once

// Command-line front end: `run`, `study` and `diagnose`.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cifv/analysis.hpp"
#include "cifv/errors.hpp"
#include "cifv/positivity.hpp"
#include "cifv/problems.hpp"
#include "cifv/solver.hpp"

namespace cifv::cli {

enum class Command { run, study, diagnose };

struct RunConfig {
  Command command = Command::run;
  std::string problem;
  MethodSpec method;
  std::vector<int> Ms;
  std::optional<int> N;
  NRule n_rule;  ///< used when N is empty
  SweepConfig sweep;
  std::string out_dir = "out";
  std::vector<double> dump_times;  ///< fractions of T
  bool positivity = false;
  bool parallel = false;

  int steps_for(int M) const { return N ? *N : n_rule(M); }
};

/// Thrown by parse_config when help was requested; carries the help text.
struct HelpRequested {
  std::string text;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// "a/b" or a decimal number.
inline double parse_fraction(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != s.size()) throw UsageError("bad dump time '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  double v = slash == std::string::npos ? number(trim(text))
                                        : number(trim(text.substr(0, slash))) / number(trim(text.substr(slash + 1)));
  if (!(v >= 0.0 && v <= 1.0)) throw UsageError("dump time '" + text + "' is not a fraction of T in [0, 1]");
  return v;
}

inline std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

struct RawOptions {
  std::string problem;
  std::string method = "eno";
  double omega = 0.0;
  double omega_bar = 1.0 / 3.0;
  double epsilon = 1e-6;
  std::vector<int> Ms;
  int N = 0;
  std::string n_rule;
  int gs = 1;
  int corrector_passes = 1;
  std::string param_update = "per-cell";
  std::string boundary = "exact";
  std::string out = "out";
  std::vector<std::string> dump_times;
  bool positivity = false;
  bool parallel = false;
  std::string config;
};

inline void add_common_options(CLI::App& sub, RawOptions& o) {
  sub.add_option("--problem", o.problem, "rotating-gaussian | rotating-shapes | burgers-smooth | "
                                         "burgers-rarefaction | burgers-shock");
  sub.add_option("--method", o.method, "first-order | fixed-omega | eno | weno");
  sub.add_option("--omega", o.omega, "weight for fixed-omega");
  sub.add_option("--omega-bar", o.omega_bar, "WENO linear weight");
  sub.add_option("--epsilon", o.epsilon, "WENO regularisation");
  sub.add_option("--M", o.Ms, "cells per direction (comma list for study)")->delimiter(',');
  sub.add_option("--N", o.N, "number of time steps");
  sub.add_option("--N-rule", o.n_rule, "time steps as M/<k>");
  sub.add_option("--gs", o.gs, "Gauss-Seidel cycles of four sweeps per phase");
  sub.add_option("--corrector-passes", o.corrector_passes, "corrector repetitions");
  sub.add_option("--param-update", o.param_update, "per-cell | per-sweep | predictor");
  sub.add_option("--boundary", o.boundary, "exact | frozen");
  sub.add_option("--out", o.out, "output directory");
  sub.add_option("--dump-times", o.dump_times, "fractions of T at which to write the field")->delimiter(',');
  sub.add_flag("--positivity", o.positivity, "write per-step positivity diagnostics");
  sub.add_flag("--parallel", o.parallel, "run study resolutions concurrently");
  sub.add_option("--config", o.config, "key=value file; command-line flags take precedence");
}

/// Applies config-file values to options the command line left unset.
inline void merge_config(CLI::App& sub, const std::string& path) {
  for (const auto& [key, value] : read_key_values(path)) {
    if (key == "config") throw UsageError("config files cannot include other config files");
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("unknown config key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

inline bool given(CLI::App& sub, const std::string& name) { return sub.get_option("--" + name)->count() > 0; }

inline RunConfig build(Command cmd, CLI::App& sub, const RawOptions& o) {
  RunConfig c;
  c.command = cmd;
  if (o.problem.empty()) throw UsageError("--problem is required");
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), o.problem) == names.end()) {
    throw UsageError("unknown problem '" + o.problem + "'");
  }
  c.problem = o.problem;

  if (o.method == "first-order") {
    c.method = MethodSpec::first_order();
  } else if (o.method == "fixed-omega") {
    if (!given(sub, "omega")) throw UsageError("--method fixed-omega needs --omega");
    if (!(o.omega >= 0.0 && o.omega <= 1.0)) throw UsageError("--omega must lie in [0, 1]");
    c.method = MethodSpec::fixed(o.omega);
  } else if (o.method == "eno") {
    c.method = MethodSpec::eno();
  } else if (o.method == "weno") {
    if (!(o.omega_bar > 0.0 && o.omega_bar < 1.0)) throw UsageError("--omega-bar must lie in (0, 1)");
    if (!(o.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
    c.method = MethodSpec::weno(o.omega_bar, o.epsilon);
  } else {
    throw UsageError("unknown method '" + o.method + "'");
  }
  if (given(sub, "omega") && c.method.kind != Method::fixed_omega) {
    throw UsageError("--omega is only valid with --method fixed-omega");
  }
  if ((given(sub, "omega-bar") || given(sub, "epsilon")) && c.method.kind != Method::weno) {
    throw UsageError("--omega-bar and --epsilon are only valid with --method weno");
  }

  if (o.Ms.empty()) throw UsageError("--M is required");
  for (int M : o.Ms) {
    if (M < 1) throw UsageError("--M values must be positive");
  }
  if (cmd != Command::study && o.Ms.size() != 1) throw UsageError("--M takes a single value outside study");
  if (cmd == Command::study) {
    for (std::size_t k = 1; k < o.Ms.size(); ++k) {
      if (o.Ms[k] != 2 * o.Ms[k - 1]) throw UsageError("study resolutions must double from one to the next");
    }
  }
  c.Ms = o.Ms;

  if (given(sub, "N") && given(sub, "N-rule")) throw UsageError("--N and --N-rule are mutually exclusive");
  if (given(sub, "N")) {
    if (o.N < 1) throw UsageError("--N must be positive");
    c.N = o.N;
  } else {
    try {
      c.n_rule = NRule::parse(o.n_rule.empty() ? "M/10" : o.n_rule);
      for (int M : c.Ms) (void)c.n_rule(M);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }

  c.sweep.gs_passes = o.gs;
  c.sweep.corrector_passes = o.corrector_passes;
  if (o.gs < 1) throw UsageError("--gs must be >= 1");
  if (o.corrector_passes < 0) throw UsageError("--corrector-passes must be >= 0");
  if (o.param_update == "per-cell") {
    c.sweep.update = ParamUpdate::per_cell;
  } else if (o.param_update == "per-sweep") {
    c.sweep.update = ParamUpdate::per_sweep;
  } else if (o.param_update == "predictor") {
    c.sweep.update = ParamUpdate::predictor;
  } else {
    throw UsageError("unknown --param-update '" + o.param_update + "'");
  }
  if (o.boundary == "exact") {
    c.sweep.boundary = BoundaryMode::exact;
  } else if (o.boundary == "frozen") {
    c.sweep.boundary = BoundaryMode::frozen;
  } else {
    throw UsageError("unknown --boundary '" + o.boundary + "'");
  }

  c.out_dir = o.out;
  for (const auto& t : o.dump_times) c.dump_times.push_back(parse_fraction(t));
  c.positivity = o.positivity;
  c.parallel = o.parallel;

  if (cmd == Command::study && (!c.dump_times.empty() || c.positivity)) {
    throw UsageError("--dump-times and --positivity apply to run, not study");
  }
  if (cmd != Command::study && c.parallel) throw UsageError("--parallel applies to study only");
  const bool linear = preset_by_name(c.problem).is_linear();
  if ((c.positivity || cmd == Command::diagnose) && !linear) {
    throw UsageError("positivity diagnostics need a linear advection problem");
  }
  return c;
}

}  // namespace detail

/// Parses argv (program name first). Throws UsageError, or HelpRequested.
inline RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Implicit high-resolution finite volume solver on rectangular grids"};
  app.require_subcommand(1);
  detail::RawOptions o;
  CLI::App* run = app.add_subcommand("run", "one simulation");
  CLI::App* study = app.add_subcommand("study", "convergence study over doubling resolutions");
  CLI::App* diagnose = app.add_subcommand("diagnose", "positivity diagnostics for linear advection");
  for (CLI::App* sub : {run, study, diagnose}) detail::add_common_options(*sub, o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  CLI::App* sub = run->parsed() ? run : study->parsed() ? study : diagnose;
  const Command cmd = sub == run ? Command::run : sub == study ? Command::study : Command::diagnose;
  if (!o.config.empty()) {
    try {
      detail::merge_config(*sub, o.config);
    } catch (const CLI::Error& e) {
      throw UsageError(std::string("config file: ") + e.what());
    }
  }
  return detail::build(cmd, *sub, o);
}

inline RunConfig parse_config(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"cifv"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

namespace detail {

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write '" + p.string() + "'");
  return os;
}

inline std::string step_file(int step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "field_step%05d.csv", step);
  return buf;
}

inline void write_params(const std::filesystem::path& dir, const ParamField& p) {
  for (Side s : kAllSides) {
    const std::string side = side_name(s);
    auto os = open_out(dir / ("params_" + side + "_omega.csv"));
    write_array_csv(os, p.grid, p[s].omega, "omega");
    auto ol = open_out(dir / ("params_" + side + "_ell.csv"));
    write_array_csv(ol, p.grid, p[s].ell, "ell");
    auto orr = open_out(dir / ("params_" + side + "_r.csv"));
    write_array_csv(orr, p.grid, p[s].r, "r");
  }
}

inline int do_run(const RunConfig& c, std::ostream& out) {
  const ProblemSpec problem = preset_by_name(c.problem);
  const int M = c.Ms.front();
  const int N = c.steps_for(M);
  const auto dir = ensure_dir(c.out_dir);
  const Grid g = problem.grid(M);
  const double tau = problem.final_time / N;

  std::set<int> dump_steps;
  for (double f : c.dump_times) dump_steps.insert(static_cast<int>(std::lround(f * N)));
  if (dump_steps.count(0) > 0) {
    auto os = open_out(dir / step_file(0));
    write_field_csv(os, fill_from_function(g, problem.initial, 0.0));
  }

  std::vector<PositivityRow> prows;
  auto observer = [&](int step, const CellField& U, const CellField&, const ParamField& p) {
    if (dump_steps.count(step) > 0) {
      auto os = open_out(dir / step_file(step));
      write_field_csv(os, U);
    }
    if (c.positivity) {
      const PositivityReport r = diagnose_step(problem, g, p, tau);
      prows.push_back({step, r.min_self, r.min_neighbors, r.violations, r.incompressibility});
    }
  };
  const SimulationResult sim = run_simulation(problem, M, N, c.method, c.sweep, observer);

  if (c.method.kind == Method::eno || c.method.kind == Method::weno) write_params(dir, sim.params);
  if (c.positivity) {
    auto os = open_out(dir / "positivity.csv");
    write_positivity_csv(os, prows);
  }

  out << "problem " << problem.name << ", method " << c.method.label() << ", M=" << M << ", N=" << N
      << ", gs=" << c.sweep.gs_passes << '\n';
  if (problem.has_exact()) {
    const std::vector<ErrorReport> rows{make_report(problem, sim, N, c.method, c.sweep)};
    auto os = open_out(dir / "table.csv");
    write_table_csv(os, rows);
    print_table(out, rows);
  }
  if (c.positivity) {
    int violations = 0;
    for (const auto& p : prows) violations += p.violations;
    out << "positivity: " << violations << " P-coefficient violations over " << prows.size() << " steps\n";
  }
  return 0;
}

inline int do_study(const RunConfig& c, std::ostream& out) {
  const ProblemSpec problem = preset_by_name(c.problem);
  const NRule rule = c.N ? NRule{1, *c.N} : c.n_rule;
  const auto rows = convergence_study(problem, c.method, c.Ms, rule, c.sweep, c.parallel);
  const auto dir = ensure_dir(c.out_dir);
  auto os = open_out(dir / "study.csv");
  write_table_csv(os, rows);
  auto ss = open_out(dir / "study_sectors.csv");
  write_sector_csv(ss, rows);
  out << "problem " << problem.name << ", method " << c.method.label() << ", N rule " << rule.str()
      << ", gs=" << c.sweep.gs_passes << '\n';
  print_table(out, rows);
  if (problem.name == "rotating-shapes") {
    out << "sector errors\n";
    print_sector_table(out, rows);
  }
  return 0;
}

inline int do_diagnose(const RunConfig& c, std::ostream& out) {
  const ProblemSpec problem = preset_by_name(c.problem);
  const int M = c.Ms.front();
  const int N = c.steps_for(M);
  const Grid g = problem.grid(M);
  const double tau = problem.final_time / N;
  const CourantData courant = compute_courant(problem, g, tau);

  std::vector<PositivityRow> rows;
  double worst_lt = 0.0;
  auto observer = [&](int step, const CellField&, const CellField&, const ParamField& p) {
    const PositivityReport r = diagnose_step(problem, g, p, tau);
    rows.push_back({step, r.min_self, r.min_neighbors, r.violations, r.incompressibility});
    worst_lt = std::max(worst_lt, check_condition_lt(p, courant));
  };
  const SimulationResult sim = run_simulation(problem, M, N, c.method, c.sweep, observer);

  const auto dir = ensure_dir(c.out_dir);
  auto os = open_out(dir / "positivity.csv");
  write_positivity_csv(os, rows);

  double min_self = std::numeric_limits<double>::infinity(), min_nb = min_self, residual = 0.0;
  int violations = 0;
  for (const auto& r : rows) {
    min_self = std::min(min_self, r.min_self);
    min_nb = std::min(min_nb, r.min_neighbors);
    violations += r.violations;
  }
  for (const auto& s : sim.reports) residual = std::max(residual, s.max_residual);
  out << "problem " << problem.name << ", method " << c.method.label() << ", M=" << M << ", N=" << N
      << ", gs=" << c.sweep.gs_passes << '\n'
      << "incompressibility residual " << format_sig(check_incompressibility(problem, g, tau), 3) << '\n'
      << "min P_ij " << format_sig(min_self, 6) << ", min neighbour P " << format_sig(min_nb, 6) << ", violations "
      << violations << '\n'
      << "largest excess over the sufficient ell condition " << format_sig(worst_lt, 4) << '\n'
      << "largest step residual " << format_sig(residual, 3) << '\n'
      << "min/max over run " << format_sig(sim.u_min, 8) << " / " << format_sig(sim.u_max, 8) << '\n';
  return 0;
}

}  // namespace detail

inline int run_command(const RunConfig& c, std::ostream& out) {
  switch (c.command) {
    case Command::run: return detail::do_run(c, out);
    case Command::study: return detail::do_study(c, out);
    case Command::diagnose: return detail::do_diagnose(c, out);
  }
  return 2;
}

/// Exit codes: 0 success, 1 solver or evaluation failure, 2 usage error.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  try {
    return run_command(config, out);
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return 1;
  } catch (const EvaluationError& e) {
    err << "evaluation failure: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cifv::cli
