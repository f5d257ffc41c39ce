#pragma once

// Solution-dependent parameters of the high-resolution scheme: smoothness
// ratios r, ENO and WENO choices of omega, the time limiter ell, and the
// Courant-like numbers C that bound ell.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "cifv/errors.hpp"
#include "cifv/grid.hpp"
#include "cifv/problems.hpp"
#include "cifv/scheme.hpp"

namespace cifv {

inline constexpr double kRatioEpsilon = 1e-14;
inline constexpr double kDegenerateRatio = std::numeric_limits<double>::infinity();

/// Numerator and denominator of r for one side of cell (i,j).
struct RatioParts {
  double num;
  double den;
};

inline RatioParts ratio_parts(const CellField& U, const CellField& u, Side s, int i, int j) {
  switch (s) {
    case Side::x_minus: return {U(i - 1, j) - u(i, j), U(i, j) - u(i + 1, j)};
    case Side::x_plus: return {U(i + 1, j) - u(i, j), U(i, j) - u(i - 1, j)};
    case Side::y_minus: return {U(i, j - 1) - u(i, j), U(i, j) - u(i, j + 1)};
    case Side::y_plus: return {U(i, j + 1) - u(i, j), U(i, j) - u(i, j - 1)};
  }
  return {0.0, 0.0};
}

/// num / den, or +inf when |den| < 1e-14 (0/0 included).
inline double safe_ratio(double num, double den) {
  if (std::abs(den) < kRatioEpsilon) return kDegenerateRatio;
  return num / den;
}

inline bool is_degenerate(double r) { return std::isinf(r); }

/// Cells on which the parameters of side s are needed: the interior plus the
/// first ghost layer across the faces in that direction.
struct CellRange {
  int i0, i1, j0, j1;
};

inline CellRange param_range(const Grid& g, Side s) {
  if (is_x(s)) return {0, g.M + 1, 1, g.M};
  return {1, g.M, 0, g.M + 1};
}

inline void compute_ratios(const CellField& U, const CellField& u, ParamField& p) {
  for (Side s : kAllSides) {
    const CellRange rg = param_range(U.grid, s);
    auto& r = p[s].r;
    for (int j = rg.j0; j <= rg.j1; ++j) {
      for (int i = rg.i0; i <= rg.i1; ++i) {
        const RatioParts q = ratio_parts(U, u, s, i, j);
        r(i, j) = safe_ratio(q.num, q.den);
      }
    }
  }
}

/// omega = 1 when |r| <= 1, else 0; a degenerate ratio selects 0.
inline double eno_select(double r) { return std::abs(r) <= 1.0 ? 1.0 : 0.0; }

/// WENO weight from the upwind difference d_u and central difference d_c.
inline double weno_weight(double d_u, double d_c, double omega_bar, double epsilon) {
  const double su = epsilon + d_u * d_u;
  const double sc = epsilon + d_c * d_c;
  const double a_u = omega_bar / (su * su);
  const double a_c = (1.0 - omega_bar) / (sc * sc);
  return a_u / (a_u + a_c);
}

inline void eno_weights(ParamField& p) {
  for (Side s : kAllSides) {
    const CellRange rg = param_range(p.grid, s);
    for (int j = rg.j0; j <= rg.j1; ++j) {
      for (int i = rg.i0; i <= rg.i1; ++i) p[s].omega(i, j) = eno_select(p[s].r(i, j));
    }
  }
}

inline void weno_weights(const CellField& U, const CellField& u, double omega_bar, double epsilon, ParamField& p) {
  for (Side s : kAllSides) {
    const CellRange rg = param_range(U.grid, s);
    for (int j = rg.j0; j <= rg.j1; ++j) {
      for (int i = rg.i0; i <= rg.i1; ++i) {
        const RatioParts q = ratio_parts(U, u, s, i, j);
        p[s].omega(i, j) = weno_weight(q.num, q.den, omega_bar, epsilon);
      }
    }
  }
}

/// One step of the ell recurrence:
///   ell = clamp01( (omega + (1-omega)/r)^{-1} (2/C + ell_up (omega_up r_up + 1 - omega_up)) )
/// with ell = 0 whenever r <= 0 or r is degenerate, and ell capped so that
/// ell/2 (omega r + 1 - omega) <= 1.
inline double limit_ell(double omega, double r, double C, double ell_up, double omega_up, double r_up) {
  if (!(r > 0.0) || is_degenerate(r)) return 0.0;
  const double factor = omega + (1.0 - omega) / r;
  if (factor <= 0.0) return 0.0;
  double upstream = 0.0;
  if (ell_up > 0.0 && !is_degenerate(r_up)) upstream = ell_up * (omega_up * r_up + 1.0 - omega_up);
  const double value = (2.0 / C + upstream) / factor;
  if (std::isnan(value)) return 0.0;
  double ell = std::clamp(value, 0.0, 1.0);
  // This cell's weight in its downstream neighbour's equation must stay at
  // most 1; only WENO weights with large r can exceed it.
  const double nb = omega * r + 1.0 - omega;
  if (nb > 2.0) ell = std::min(ell, 2.0 / nb);
  return ell;
}

/// Courant numbers. For linear advection the edge Courant numbers are
/// stored as k * v at x-faces (cx) and k * w at y-faces (cy), k = tau/h,
/// and C is per cell; for conservation laws C is one global value.
struct CourantData {
  bool linear = true;
  double k = 0.0;
  PaddedArray<double> cx;    ///< k v(x_{i+1/2}, y_j)
  PaddedArray<double> cy;    ///< k w(x_i, y_{j+1/2})
  PaddedArray<double> cell;  ///< per-cell C, floored at 1 (linear only)
  double global = 1.0;       ///< C for conservation laws
  double cmax_x = 0.0;
  double cmax_y = 0.0;
  double cmax = 0.0;  ///< k * max|u| (conservation laws)

  double local(int i, int j) const { return linear ? cell(i, j) : global; }

  double east_plus(int i, int j) const { return std::max(0.0, cx(i, j)); }
  double east_minus(int i, int j) const { return std::min(0.0, cx(i, j)); }
  double west_plus(int i, int j) const { return std::max(0.0, cx(i - 1, j)); }
  double west_minus(int i, int j) const { return std::min(0.0, cx(i - 1, j)); }
  double north_plus(int i, int j) const { return std::max(0.0, cy(i, j)); }
  double north_minus(int i, int j) const { return std::min(0.0, cy(i, j)); }
  double south_plus(int i, int j) const { return std::max(0.0, cy(i, j - 1)); }
  double south_minus(int i, int j) const { return std::min(0.0, cy(i, j - 1)); }
};

/// For linear advection u_range is ignored. For conservation laws it must
/// bracket all current values; an empty or missing range is an error.
inline CourantData compute_courant(const ProblemSpec& problem, const Grid& g, double tau,
                                   std::optional<std::pair<double, double>> u_range = std::nullopt) {
  CourantData c;
  c.k = tau / g.h;
  if (problem.is_linear()) {
    c.linear = true;
    const EdgeVelocities e = sample_edge_velocities(g, problem.velocity);
    c.cx = PaddedArray<double>(g.M);
    c.cy = PaddedArray<double>(g.M);
    c.cell = PaddedArray<double>(g.M, 1.0);
    for (int j = g.first_padded(); j <= g.last_padded(); ++j) {
      for (int i = g.first_padded(); i <= g.last_padded(); ++i) {
        c.cx(i, j) = c.k * e.vx(i, j);
        c.cy(i, j) = c.k * e.wy(i, j);
      }
    }
    for (int j = 0; j <= g.M + 1; ++j) {
      for (int i = 0; i <= g.M + 1; ++i) {
        const double sum = c.east_plus(i, j) - c.west_minus(i, j) + c.north_plus(i, j) - c.south_minus(i, j);
        c.cell(i, j) = std::max(1.0, sum);
      }
    }
    // Directional maxima over every edge midpoint of the interior cells.
    double vmax = 0.0, wmax = 0.0;
    for (int j = 1; j <= g.M; ++j) {
      for (int i = 1; i <= g.M; ++i) {
        for (const auto& [x, y] : {std::pair{g.x_face(i - 1), g.yc(j)}, std::pair{g.x_face(i), g.yc(j)},
                                   std::pair{g.xc(i), g.y_face(j - 1)}, std::pair{g.xc(i), g.y_face(j)}}) {
          const Velocity v = problem.velocity(x, y);
          vmax = std::max(vmax, std::abs(v.v));
          wmax = std::max(wmax, std::abs(v.w));
        }
      }
    }
    c.cmax_x = c.k * vmax;
    c.cmax_y = c.k * wmax;
    return c;
  }
  c.linear = false;
  if (!u_range || u_range->first > u_range->second) {
    throw ConfigError("courant: conservation law needs a non-empty value range");
  }
  const auto [lo, hi] = *u_range;
  const double sx = flux_max_abs_derivative(problem.flux_f, lo, hi);
  const double sy = flux_max_abs_derivative(problem.flux_g, lo, hi);
  c.global = std::max(1.0, c.k * sx + c.k * sy);
  c.cmax_x = c.k * sx;
  c.cmax_y = c.k * sy;
  c.cmax = c.k * std::max(std::abs(lo), std::abs(hi));
  return c;
}

/// Fills ell for every side by running its recurrence against the flow
/// direction it serves: x_minus with increasing i (upstream (i-1,j)),
/// x_plus with decreasing i (upstream (i+1,j)), and likewise in y. The
/// upstream value beyond the parameter range is 0.
inline void compute_ell(ParamField& p, const CourantData& courant) {
  const Grid& g = p.grid;
  for (Side s : kAllSides) {
    const CellRange rg = param_range(g, s);
    auto& sp = p[s];
    auto update = [&](int i, int j, int iu, int ju, bool upstream_inside) {
      const double ell_up = upstream_inside ? sp.ell(iu, ju) : 0.0;
      const double om_up = upstream_inside ? sp.omega(iu, ju) : 0.0;
      const double r_up = upstream_inside ? sp.r(iu, ju) : 1.0;
      sp.ell(i, j) = limit_ell(sp.omega(i, j), sp.r(i, j), courant.local(i, j), ell_up, om_up, r_up);
    };
    switch (s) {
      case Side::x_minus:
        for (int j = rg.j0; j <= rg.j1; ++j)
          for (int i = rg.i0; i <= rg.i1; ++i) update(i, j, i - 1, j, i > rg.i0);
        break;
      case Side::x_plus:
        for (int j = rg.j0; j <= rg.j1; ++j)
          for (int i = rg.i1; i >= rg.i0; --i) update(i, j, i + 1, j, i < rg.i1);
        break;
      case Side::y_minus:
        for (int j = rg.j0; j <= rg.j1; ++j)
          for (int i = rg.i0; i <= rg.i1; ++i) update(i, j, i, j - 1, j > rg.j0);
        break;
      case Side::y_plus:
        for (int j = rg.j1; j >= rg.j0; --j)
          for (int i = rg.i0; i <= rg.i1; ++i) update(i, j, i, j + 1, j < rg.j1);
        break;
    }
  }
}

}  // namespace cifv
