#pragma once

// The compact implicit residual. Each interior cell (i,j) contributes one
// scalar equation
//
//   U_ij - u_ij + k (F_{i+1/2,j} - F_{i-1/2,j}) + k (G_{i,j+1/2} - G_{i,j-1/2}) = 0,   k = tau / h,
//
// with U the unknown level n+1 and u the known level n. Interface states are
// parametric reconstructions controlled per cell by a weight omega (1 selects
// the upwind difference, 0 the central one) and a time limiter ell (0 gives
// the first order closure).
//
// Ownership: the "-" states at faces i+1/2 and j+1/2 are built in cell
// (i,j) with its x_minus / y_minus parameters; the "+" states at faces
// i-1/2 and j-1/2 are built in cell (i,j) with its x_plus / y_plus
// parameters. Cell (i,j) therefore reads "+" states owned by (i+1,j) and
// (i,j+1) and "-" states owned by (i-1,j) and (i,j-1).

#include <array>
#include <cmath>
#include <limits>

#include "cifv/grid.hpp"
#include "cifv/problems.hpp"

namespace cifv {

struct InterfaceParams {
  double omega = 0.0;
  double ell = 1.0;
};

/// Reconstructed interface value
///   U_c - (ell/2) [omega (U_far - u_c) + (1 - omega) (U_c - u_near)]
/// where c is the owning cell, "far" its neighbour away from the face and
/// "near" its neighbour across the face.
///
/// In x for the "-" state at i+1/2: c = i, far = i-1, near = i+1.
/// In x for the "+" state at i+1/2: c = i+1, far = i+2, near = i.
/// The y states follow by transposing indices.
inline double reconstruct(double u_new_c, double u_new_far, double u_old_c, double u_old_near, InterfaceParams p) {
  return u_new_c - 0.5 * p.ell * (p.omega * (u_new_far - u_old_c) + (1.0 - p.omega) * (u_new_c - u_old_near));
}

/// u^{n+1/2,-}_{i+1/2,j} built in cell (i,j).
inline double reconstruct_minus(double u_new_ij, double u_new_im1j, double u_n_ij, double u_n_ip1j, InterfaceParams p) {
  return reconstruct(u_new_ij, u_new_im1j, u_n_ij, u_n_ip1j, p);
}

/// u^{n+1/2,+}_{i+1/2,j} built in cell (i+1,j).
inline double reconstruct_plus(double u_new_ip1j, double u_new_ip2j, double u_n_ip1j, double u_n_ij, InterfaceParams p) {
  return reconstruct(u_new_ip1j, u_new_ip2j, u_n_ip1j, u_n_ij, p);
}

enum class Side : int { x_minus = 0, x_plus = 1, y_minus = 2, y_plus = 3 };
inline constexpr std::array<Side, 4> kAllSides = {Side::x_minus, Side::x_plus, Side::y_minus, Side::y_plus};

inline const char* side_name(Side s) {
  switch (s) {
    case Side::x_minus: return "xm";
    case Side::x_plus: return "xp";
    case Side::y_minus: return "ym";
    case Side::y_plus: return "yp";
  }
  return "?";
}

inline bool is_x(Side s) { return s == Side::x_minus || s == Side::x_plus; }

/// omega, ell and r per cell for one (direction, side).
struct SideParams {
  PaddedArray<double> omega;
  PaddedArray<double> ell;
  PaddedArray<double> r;
};

struct ParamField {
  Grid grid;
  std::array<SideParams, 4> sides;

  ParamField() = default;
  ParamField(const Grid& g, double omega, double ell) : grid(g) {
    for (auto& s : sides) {
      s.omega = PaddedArray<double>(g.M, omega);
      s.ell = PaddedArray<double>(g.M, ell);
      s.r = PaddedArray<double>(g.M, std::numeric_limits<double>::infinity());
    }
  }

  SideParams& operator[](Side s) { return sides[static_cast<int>(s)]; }
  const SideParams& operator[](Side s) const { return sides[static_cast<int>(s)]; }

  InterfaceParams at(Side s, int i, int j) const {
    const auto& sp = (*this)[s];
    return {sp.omega(i, j), sp.ell(i, j)};
  }

  void set_uniform(double omega, double ell) {
    for (auto& s : sides) {
      s.omega.fill(omega);
      s.ell.fill(ell);
    }
  }
};

/// Velocity samples at edge midpoints: vx(i,j) = v(x_{i+1/2}, y_j) and
/// wy(i,j) = w(x_i, y_{j+1/2}), over the whole padded index range.
struct EdgeVelocities {
  PaddedArray<double> vx;
  PaddedArray<double> wy;
};

inline EdgeVelocities sample_edge_velocities(const Grid& g, const std::function<Velocity(double, double)>& vel) {
  EdgeVelocities e{PaddedArray<double>(g.M), PaddedArray<double>(g.M)};
  for (int j = g.first_padded(); j <= g.last_padded(); ++j) {
    for (int i = g.first_padded(); i <= g.last_padded(); ++i) {
      e.vx(i, j) = vel(g.x_face(i), g.yc(j)).v;
      e.wy(i, j) = vel(g.xc(i), g.y_face(j)).w;
    }
  }
  return e;
}

/// a * U + b, where U is the cell's own unknown.
struct Affine {
  double slope = 0.0;
  double offset = 0.0;
  double operator()(double u) const { return slope * u + offset; }
};

/// The eight interface states entering the equation of one cell, with the
/// four states the cell owns kept as affine functions of its own unknown.
struct CellStencil {
  double u_old = 0.0;
  Affine east_minus;   ///< u^-_{i+1/2,j}, owned by (i,j)
  double east_plus;    ///< u^+_{i+1/2,j}, owned by (i+1,j)
  double west_minus;   ///< u^-_{i-1/2,j}, owned by (i-1,j)
  Affine west_plus;    ///< u^+_{i-1/2,j}, owned by (i,j)
  Affine north_minus;  ///< u^-_{i,j+1/2}
  double north_plus;   ///< u^+_{i,j+1/2}
  double south_minus;  ///< u^-_{i,j-1/2}
  Affine south_plus;   ///< u^+_{i,j-1/2}
};

namespace detail {
inline Affine owned_state(double u_new_far, double u_old_c, double u_old_near, InterfaceParams p) {
  return {1.0 - 0.5 * p.ell * (1.0 - p.omega), reconstruct(0.0, u_new_far, u_old_c, u_old_near, p)};
}
}  // namespace detail

/// Collects the stencil of interior cell (i,j). Reads U and u on
/// (i +- 2, j) and (i, j +- 2), all inside the padded range.
inline CellStencil gather_stencil(const CellField& U, const CellField& u, const ParamField& p, int i, int j) {
  CellStencil s;
  s.u_old = u(i, j);
  s.east_minus = detail::owned_state(U(i - 1, j), u(i, j), u(i + 1, j), p.at(Side::x_minus, i, j));
  s.east_plus = reconstruct_plus(U(i + 1, j), U(i + 2, j), u(i + 1, j), u(i, j), p.at(Side::x_plus, i + 1, j));
  s.west_minus = reconstruct_minus(U(i - 1, j), U(i - 2, j), u(i - 1, j), u(i, j), p.at(Side::x_minus, i - 1, j));
  s.west_plus = detail::owned_state(U(i + 1, j), u(i, j), u(i - 1, j), p.at(Side::x_plus, i, j));
  s.north_minus = detail::owned_state(U(i, j - 1), u(i, j), u(i, j + 1), p.at(Side::y_minus, i, j));
  s.north_plus = reconstruct_plus(U(i, j + 1), U(i, j + 2), u(i, j + 1), u(i, j), p.at(Side::y_plus, i, j + 1));
  s.south_minus = reconstruct_minus(U(i, j - 1), U(i, j - 2), u(i, j - 1), u(i, j), p.at(Side::y_minus, i, j - 1));
  s.south_plus = detail::owned_state(U(i, j + 1), u(i, j), u(i, j - 1), p.at(Side::y_plus, i, j));
  return s;
}

/// Split edge velocities around one cell.
struct CellVelocities {
  SplitVelocity east, west, north, south;
};

inline CellVelocities cell_velocities(const EdgeVelocities& e, int i, int j) {
  return {split_velocity(e.vx(i, j)), split_velocity(e.vx(i - 1, j)), split_velocity(e.wy(i, j)),
          split_velocity(e.wy(i, j - 1))};
}

/// Residual of the linear advection equation, affine in the unknown.
inline Affine advection_residual_affine(const CellStencil& s, const CellVelocities& v, double k) {
  Affine r;
  r.slope = 1.0 + k * (v.east.plus * s.east_minus.slope - v.west.minus * s.west_plus.slope +
                       v.north.plus * s.north_minus.slope - v.south.minus * s.south_plus.slope);
  r.offset = -s.u_old + k * (v.east.plus * s.east_minus.offset + v.east.minus * s.east_plus -
                             v.west.plus * s.west_minus - v.west.minus * s.west_plus.offset +
                             v.north.plus * s.north_minus.offset + v.north.minus * s.north_plus -
                             v.south.plus * s.south_minus - v.south.minus * s.south_plus.offset);
  return r;
}

/// Left-hand side of the linear advection scheme at candidate u_new.
inline double advection_residual(const CellStencil& s, const CellVelocities& v, double k, double u_new) {
  const double fe = v.east.plus * s.east_minus(u_new) + v.east.minus * s.east_plus;
  const double fw = v.west.plus * s.west_minus + v.west.minus * s.west_plus(u_new);
  const double gn = v.north.plus * s.north_minus(u_new) + v.north.minus * s.north_plus;
  const double gs = v.south.plus * s.south_minus + v.south.minus * s.south_plus(u_new);
  return u_new - s.u_old + k * (fe - fw) + k * (gn - gs);
}

/// Left-hand side of the conservation-law scheme with Godunov fluxes.
template <class FluxF, class FluxG>
double conservation_residual(const CellStencil& s, const FluxF& f, const FluxG& g, double k, double u_new) {
  const double fe = godunov_flux(f, s.east_minus(u_new), s.east_plus);
  const double fw = godunov_flux(f, s.west_minus, s.west_plus(u_new));
  const double gn = godunov_flux(g, s.north_minus(u_new), s.north_plus);
  const double gs = godunov_flux(g, s.south_minus, s.south_plus(u_new));
  return u_new - s.u_old + k * (fe - fw) + k * (gn - gs);
}

/// Residual of cell (i,j) with U(i,j) as the candidate value.
inline double cell_residual_advection(const CellField& U, const CellField& u, const ParamField& p,
                                      const EdgeVelocities& e, double tau, int i, int j) {
  const double k = tau / U.grid.h;
  return advection_residual(gather_stencil(U, u, p, i, j), cell_velocities(e, i, j), k, U(i, j));
}

inline double cell_residual_conservation(const CellField& U, const CellField& u, const ParamField& p,
                                         const Flux& f, const Flux& g, double tau, int i, int j) {
  const double k = tau / U.grid.h;
  return conservation_residual(gather_stencil(U, u, p, i, j), f, g, k, U(i, j));
}

}  // namespace cifv
