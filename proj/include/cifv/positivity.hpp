#pragma once

// Convex-combination diagnostics for the linear high-resolution scheme.
// For a discretely incompressible velocity the cell equation can be written
//
//   P_ij (U_ij - u_ij) + sum_nb P_nb (U_ij - U_nb) = 0,   nb = (i+-1,j), (i,j+-1),
//
// so non-negative P give a local discrete min/max principle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "cifv/errors.hpp"
#include "cifv/grid.hpp"
#include "cifv/limiters.hpp"
#include "cifv/problems.hpp"
#include "cifv/scheme.hpp"

namespace cifv {

inline constexpr double kPositivityTol = 1e-10;

/// max over interior cells of |C+_e + C-_e - C+_w - C-_w + (y terms)|.
inline double check_incompressibility(const ProblemSpec& problem, const Grid& g, double tau) {
  if (!problem.is_linear()) throw UsageError("incompressibility check needs a linear advection problem");
  const CourantData c = compute_courant(problem, g, tau);
  double m = 0.0;
  for (int j = 1; j <= g.M; ++j) {
    for (int i = 1; i <= g.M; ++i) {
      const double d = c.cx(i, j) - c.cx(i - 1, j) + c.cy(i, j) - c.cy(i, j - 1);
      m = std::max(m, std::abs(d));
    }
  }
  return m;
}

struct ACoefficients {
  double self;      ///< (omega + (1 - omega)/r) / 2, without ell
  double neighbor;  ///< ell/2 (omega r + 1 - omega)
};

inline ACoefficients assemble_A(double omega, double ell, double r) {
  if (is_degenerate(r)) {
    // (1 - omega)/r -> 0; omega r has no finite limit, so only omega = 0 is meaningful.
    if (ell == 0.0) return {0.5 * omega, 0.0};
    return {0.5 * omega, omega == 0.0 ? 0.5 * ell : kDegenerateRatio};
  }
  return {0.5 * (omega + (1.0 - omega) / r), 0.5 * ell * (omega * r + 1.0 - omega)};
}

struct PositivityReport {
  PaddedArray<double> p_self;   ///< P_{i,j}
  PaddedArray<double> p_west;   ///< P_{i-1,j}
  PaddedArray<double> p_east;   ///< P_{i+1,j}
  PaddedArray<double> p_south;  ///< P_{i,j-1}
  PaddedArray<double> p_north;  ///< P_{i,j+1}
  double min_self = 0.0;
  double min_neighbors = 0.0;
  int violations = 0;
  double incompressibility = 0.0;
};

/// P coefficients of every interior cell from stored parameters.
inline PositivityReport assemble_P(const ParamField& p, const CourantData& c) {
  if (!c.linear) throw UsageError("P coefficients are defined for linear advection only");
  const Grid& g = p.grid;
  PositivityReport rep{PaddedArray<double>(g.M), PaddedArray<double>(g.M), PaddedArray<double>(g.M),
                       PaddedArray<double>(g.M), PaddedArray<double>(g.M)};
  rep.min_self = std::numeric_limits<double>::infinity();
  rep.min_neighbors = rep.min_self;
  auto A = [&](Side s, int i, int j) {
    const auto& sp = p[s];
    return assemble_A(sp.omega(i, j), sp.ell(i, j), sp.r(i, j));
  };
  auto ell = [&](Side s, int i, int j) { return p[s].ell(i, j); };
  for (int j = 1; j <= g.M; ++j) {
    for (int i = 1; i <= g.M; ++i) {
      const double ep = c.east_plus(i, j), em = c.east_minus(i, j);
      const double wp = c.west_plus(i, j), wm = c.west_minus(i, j);
      const double np = c.north_plus(i, j), nm = c.north_minus(i, j);
      const double sp = c.south_plus(i, j), sm = c.south_minus(i, j);
      // Own "self" coefficients enter only when the face they serve carries
      // outflow; skipping the product avoids 0 * inf from degenerate ratios.
      auto own = [&](double courant, Side s) {
        return courant == 0.0 ? 0.0 : courant * ell(s, i, j) * A(s, i, j).self;
      };
      auto nb = [&](double courant, Side s, int ii, int jj) {
        return courant == 0.0 ? 0.0 : courant * A(s, ii, jj).neighbor;
      };
      const double xm_own = own(ep, Side::x_minus);
      const double xp_own = own(wm, Side::x_plus);
      const double ym_own = own(np, Side::y_minus);
      const double yp_own = own(sm, Side::y_plus);
      const double xm_nb = nb(wp, Side::x_minus, i - 1, j);
      const double xp_nb = nb(em, Side::x_plus, i + 1, j);
      const double ym_nb = nb(sp, Side::y_minus, i, j - 1);
      const double yp_nb = nb(nm, Side::y_plus, i, j + 1);

      rep.p_west(i, j) = xm_own + wp - xm_nb;
      rep.p_east(i, j) = -xp_own - em + xp_nb;
      rep.p_south(i, j) = ym_own + sp - ym_nb;
      rep.p_north(i, j) = -yp_own - nm + yp_nb;
      rep.p_self(i, j) = 1.0 - xm_own + xm_nb + xp_own - xp_nb - ym_own + ym_nb + yp_own - yp_nb;

      const double nbs[] = {rep.p_west(i, j), rep.p_east(i, j), rep.p_south(i, j), rep.p_north(i, j)};
      rep.min_self = std::min(rep.min_self, rep.p_self(i, j));
      for (double v : nbs) {
        rep.min_neighbors = std::min(rep.min_neighbors, v);
        if (v < -kPositivityTol) ++rep.violations;
      }
      if (rep.p_self(i, j) < -kPositivityTol) ++rep.violations;
    }
  }
  return rep;
}

/// Recomputes r on every side from (U, u), keeping omega and ell.
inline ParamField with_current_ratios(const ParamField& p, const CellField& U, const CellField& u) {
  ParamField q = p;
  compute_ratios(U, u, q);
  return q;
}

/// Positivity report for a completed step from the parameters the solver
/// used, plus the incompressibility residual of the velocity field.
inline PositivityReport diagnose_step(const ProblemSpec& problem, const Grid& g, const ParamField& p, double tau) {
  const CourantData c = compute_courant(problem, g, tau);
  PositivityReport rep = assemble_P(p, c);
  rep.incompressibility = check_incompressibility(problem, g, tau);
  return rep;
}

/// Largest positive excess of
///   sum_s ell_s A_s  over  (1/C) (1 + C+_w A_{i-1} - C-_e A_{i+1} + C+_s A_{j-1} - C-_n A_{j+1}),
/// 0 when the sufficient condition holds everywhere.
inline double check_condition_lt(const ParamField& p, const CourantData& c) {
  const Grid& g = p.grid;
  double worst = 0.0;
  for (int j = 1; j <= g.M; ++j) {
    for (int i = 1; i <= g.M; ++i) {
      double lhs = 0.0;
      for (Side s : kAllSides) {
        const double l = p[s].ell(i, j);
        if (l != 0.0) lhs += l * assemble_A(p[s].omega(i, j), l, p[s].r(i, j)).self;
      }
      auto nb = [&](double courant, Side s, int ii, int jj) {
        return courant == 0.0 ? 0.0 : courant * assemble_A(p[s].omega(ii, jj), p[s].ell(ii, jj), p[s].r(ii, jj)).neighbor;
      };
      const double rhs = (1.0 + nb(c.west_plus(i, j), Side::x_minus, i - 1, j) -
                          nb(c.east_minus(i, j), Side::x_plus, i + 1, j) +
                          nb(c.south_plus(i, j), Side::y_minus, i, j - 1) -
                          nb(c.north_minus(i, j), Side::y_plus, i, j + 1)) /
                         c.local(i, j);
      worst = std::max(worst, lhs - rhs);
    }
  }
  return worst;
}

/// Residual of the P-form, P_ij (U - u) + sum P_nb (U - U_nb), at cell (i,j).
inline double p_form_residual(const PositivityReport& rep, const CellField& U, const CellField& u, int i, int j) {
  const double c = U(i, j);
  return rep.p_self(i, j) * (c - u(i, j)) + rep.p_west(i, j) * (c - U(i - 1, j)) +
         rep.p_east(i, j) * (c - U(i + 1, j)) + rep.p_south(i, j) * (c - U(i, j - 1)) +
         rep.p_north(i, j) * (c - U(i, j + 1));
}

struct PositivityRow {
  int step;
  double min_self;
  double min_neighbors;
  int violations;
  double incompressibility;
};

inline void write_positivity_csv(std::ostream& os, const std::vector<PositivityRow>& rows) {
  os << "step,min_Pij,min_Pneighbors,violations,incompr_residual\n";
  for (const auto& r : rows) {
    os << r.step << ',' << format_number(r.min_self) << ',' << format_number(r.min_neighbors) << ','
       << r.violations << ',' << format_number(r.incompressibility) << '\n';
  }
}

}  // namespace cifv
