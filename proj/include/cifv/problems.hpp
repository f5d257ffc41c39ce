#pragma once

// Problem definitions: flux functions, the Godunov numerical flux, velocity
// splitting, and the five benchmark presets (rotating Gaussian, rotating
// shapes, smooth Burgers, Burgers rarefaction, Burgers shock).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cifv/errors.hpp"
#include "cifv/grid.hpp"

namespace cifv {

enum class ProblemKind { linear_advection, scalar_conservation };

/// h(u) = u^2 / 2.
struct BurgersFlux {
  double value(double u) const { return 0.5 * u * u; }
  double derivative(double u) const { return u; }
  double max_abs_derivative(double lo, double hi) const { return std::max(std::abs(lo), std::abs(hi)); }
};

/// Arbitrary flux given by callables. critical_points lists the roots of
/// h'; when empty, a single interior root is located by bisection whenever
/// h' changes sign over the interval.
struct GenericFlux {
  std::function<double(double)> h;
  std::function<double(double)> dh;
  std::vector<double> critical_points;

  double value(double u) const { return h(u); }
  double derivative(double u) const { return dh(u); }
  double max_abs_derivative(double lo, double hi) const {
    double m = std::max(std::abs(dh(lo)), std::abs(dh(hi)));
    constexpr int kSamples = 64;
    for (int s = 1; s < kSamples; ++s) m = std::max(m, std::abs(dh(lo + (hi - lo) * s / kSamples)));
    return m;
  }
};

using Flux = std::variant<BurgersFlux, GenericFlux>;

inline double flux_value(const Flux& f, double u) {
  return std::visit([u](const auto& h) { return h.value(u); }, f);
}
inline double flux_derivative(const Flux& f, double u) {
  return std::visit([u](const auto& h) { return h.derivative(u); }, f);
}
inline double flux_max_abs_derivative(const Flux& f, double lo, double hi) {
  return std::visit([=](const auto& h) { return h.max_abs_derivative(lo, hi); }, f);
}

/// Godunov flux: min of h over [u-, u+] when u- <= u+, otherwise max of h
/// over [u+, u-].
inline double godunov_flux(const BurgersFlux& h, double u_minus, double u_plus) {
  if (u_minus <= u_plus) {
    if (u_minus <= 0.0 && u_plus >= 0.0) return 0.0;
    return std::min(h.value(u_minus), h.value(u_plus));
  }
  return std::max(h.value(u_minus), h.value(u_plus));
}

namespace detail {
inline std::optional<double> bisect_root(const std::function<double(double)>& g, double a, double b) {
  double ga = g(a);
  double gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if ((ga < 0.0) == (gb < 0.0)) return std::nullopt;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}
}  // namespace detail

inline double godunov_flux(const GenericFlux& h, double u_minus, double u_plus) {
  const double lo = std::min(u_minus, u_plus);
  const double hi = std::max(u_minus, u_plus);
  const bool take_min = u_minus <= u_plus;
  double best = take_min ? std::min(h.value(lo), h.value(hi)) : std::max(h.value(lo), h.value(hi));
  auto consider = [&](double u) {
    const double v = h.value(u);
    best = take_min ? std::min(best, v) : std::max(best, v);
  };
  if (!h.critical_points.empty()) {
    for (double c : h.critical_points) {
      if (c > lo && c < hi) consider(c);
    }
  } else if (h.dh && hi > lo) {
    if (auto c = detail::bisect_root(h.dh, lo, hi)) consider(*c);
  }
  return best;
}

inline double godunov_flux(const Flux& f, double u_minus, double u_plus) {
  return std::visit([=](const auto& h) { return godunov_flux(h, u_minus, u_plus); }, f);
}

/// Godunov flux for an arbitrary h given with its derivative.
inline double godunov_flux(const std::function<double(double)>& h, const std::function<double(double)>& dh,
                           double u_minus, double u_plus) {
  return godunov_flux(GenericFlux{h, dh, {}}, u_minus, u_plus);
}

struct SplitVelocity {
  double plus;   ///< max(0, v)
  double minus;  ///< min(0, v)
};

inline SplitVelocity split_velocity(double v) { return {std::max(0.0, v), std::min(0.0, v)}; }

struct Velocity {
  double v;
  double w;
};

struct ProblemSpec {
  std::string name;
  ProblemKind kind = ProblemKind::linear_advection;
  Flux flux_f = BurgersFlux{};
  Flux flux_g = BurgersFlux{};
  std::function<Velocity(double, double)> velocity;
  PointFunction initial;
  SpaceTimeFunction exact;  ///< empty when no exact solution is known
  double final_time = 1.0;
  double x_lo = -1.0, x_hi = 1.0, y_lo = -1.0, y_hi = 1.0;

  bool has_exact() const { return static_cast<bool>(exact); }
  bool is_linear() const { return kind == ProblemKind::linear_advection; }
  Grid grid(int M) const { return make_grid(x_lo, x_hi, y_lo, y_hi, M); }
};

/// Rankine-Hugoniot speeds of the shock preset.
struct ShockSpeeds {
  double s_x1, s_x2, s_y1, s_y2;
};

inline double rankine_hugoniot(const Flux& h, double u_left, double u_right) {
  return (flux_value(h, u_left) - flux_value(h, u_right)) / (u_left - u_right);
}

namespace presets {

inline constexpr double kPi = std::numbers::pi;

inline Velocity rotation_velocity(double x, double y) { return {-2.0 * kPi * y, 2.0 * kPi * x}; }

/// Exact solution of advection by the rotation field for any initial data.
inline SpaceTimeFunction rotated(PointFunction u0) {
  return [u0 = std::move(u0)](double x, double y, double t) {
    const double c = std::cos(2.0 * kPi * t);
    const double s = std::sin(2.0 * kPi * t);
    return u0(x * c + y * s, y * c - x * s);
  };
}

inline double gaussian(double x, double y) {
  return std::exp(10.0 * (-(x - 0.25) * (x - 0.25) - (y - 0.25) * (y - 0.25)));
}

inline double four_shapes(double x, double y) {
  const double dg2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
  if (x >= 0.0 && y >= 0.0 && dg2 < 0.3 * 0.3) return std::exp(100.0 * (-(x - 0.5) * (x - 0.5) - (y - 0.5) * (y - 0.5)));
  const double dc = std::sqrt((x + 0.5) * (x + 0.5) + (y - 0.5) * (y - 0.5));
  if (x < 0.0 && y >= 0.0 && dc <= 0.25) return 1.0 - dc / 0.25;
  const double ds = std::sqrt((x + 0.5) * (x + 0.5) + (y + 0.5) * (y + 0.5));
  if (x < 0.0 && y < 0.0 && ds <= 0.25) {
    const double q = ds / 0.25;
    return std::sqrt(1.0 - q * q);
  }
  const double dz = std::sqrt((x - 0.5) * (x - 0.5) + (y + 0.5) * (y + 0.5));
  if (x >= 0.0 && y < 0.0 && dz <= 0.25) return 1.0;
  return 0.0;
}

inline double sine_product(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y) / 2.0; }

/// Solves u = sin(pi(x - u t)) sin(pi(y - u t)) / 2 by Newton iteration from
/// u0(x, y), falling back to bisection on [-1/2, 1/2].
inline double burgers_characteristic(double x, double y, double t) {
  const double u0 = sine_product(x, y);
  if (t == 0.0) return u0;
  auto residual = [&](double u) { return u - std::sin(kPi * (x - u * t)) * std::sin(kPi * (y - u * t)) / 2.0; };
  auto slope = [&](double u) { return 1.0 + 0.5 * kPi * t * std::sin(kPi * (x + y - 2.0 * u * t)); };
  double u = u0;
  for (int it = 0; it < 50; ++it) {
    const double r = residual(u);
    if (std::abs(r) < 1e-13) return u;
    const double d = slope(u);
    if (d <= 0.0) break;
    u -= r / d;
    if (!std::isfinite(u) || std::abs(u) > 0.5) break;
  }
  if (std::abs(residual(u)) < 1e-13) return u;
  double a = -0.5, b = 0.5;
  const double ra = residual(a);
  if (ra > 0.0 || residual(b) < 0.0) {
    throw EvaluationError("burgers characteristic solve has no bracket at (" + std::to_string(x) + "," +
                          std::to_string(y) + "," + std::to_string(t) + ")");
  }
  if (ra == 0.0) return a;
  // residual is increasing in u, so the sign of rm alone picks the half
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    const double m = 0.5 * (a + b);
    const double rm = residual(m);
    if (rm == 0.0) return m;
    if (rm < 0.0) {
      a = m;
    } else {
      b = m;
    }
  }
  const double root = 0.5 * (a + b);
  if (std::abs(residual(root)) > 1e-12) {
    throw EvaluationError("burgers characteristic solve did not converge at (" + std::to_string(x) + "," +
                          std::to_string(y) + "," + std::to_string(t) + ")");
  }
  return root;
}

inline constexpr double kRarefactionLeft = -1.0;
inline constexpr double kRarefactionRight = 1.0;

inline double rarefaction_initial(double x, double y) {
  return (x + y) / 2.0 < 0.0 ? kRarefactionLeft : kRarefactionRight;
}

inline double rarefaction_exact(double x, double y, double t) {
  if (t <= 0.0) return rarefaction_initial(x, y);
  const double s = (x + y) / 2.0;
  if (s <= -t) return kRarefactionLeft;
  if (s <= t) return (x + y) / (2.0 * t);
  return kRarefactionRight;
}

inline constexpr double kShockL1 = 1.0;
inline constexpr double kShockR1 = 0.1;  // equals kShockL2
inline constexpr double kShockL2 = 0.1;
inline constexpr double kShockR2 = -0.5;

inline ShockSpeeds shock_speeds(const Flux& f = BurgersFlux{}, const Flux& g = BurgersFlux{}) {
  return {rankine_hugoniot(f, kShockL1, kShockR1), rankine_hugoniot(f, kShockL2, kShockR2),
          rankine_hugoniot(g, kShockL1, kShockR1), rankine_hugoniot(g, kShockL2, kShockR2)};
}

// Region tests are evaluated top-down exactly as the piecewise formula is
// written, including the `or` chains.
inline double shock_exact(double x, double y, double t) {
  static const ShockSpeeds s = shock_speeds();
  if (x < -0.8 + s.s_x1 * t || y < -0.8 + s.s_y1 * t || x + y < -0.8 + (s.s_x1 + s.s_y1) * t) return kShockL1;
  if (x < 0.2 + s.s_x2 * t || y < 0.2 + s.s_y2 * t || x + y < 0.7 + (s.s_x2 + s.s_y2) * t) return kShockL2;
  return kShockR2;
}

inline double shock_initial(double x, double y) {
  if (x < -0.8 || y < -0.8 || x + y < -0.8) return kShockL1;
  if (x < 0.2 || y < 0.2 || x + y < 0.7) return kShockL2;
  return kShockR2;
}

}  // namespace presets

inline ProblemSpec preset_rotating_gaussian() {
  ProblemSpec p;
  p.name = "rotating-gaussian";
  p.kind = ProblemKind::linear_advection;
  p.velocity = presets::rotation_velocity;
  p.initial = presets::gaussian;
  p.exact = presets::rotated(presets::gaussian);
  p.final_time = 0.25;
  return p;
}

inline ProblemSpec preset_rotating_shapes() {
  ProblemSpec p = preset_rotating_gaussian();
  p.name = "rotating-shapes";
  p.initial = presets::four_shapes;
  p.exact = presets::rotated(presets::four_shapes);
  return p;
}

inline ProblemSpec preset_burgers_smooth() {
  ProblemSpec p;
  p.name = "burgers-smooth";
  p.kind = ProblemKind::scalar_conservation;
  p.initial = presets::sine_product;
  p.exact = presets::burgers_characteristic;
  p.final_time = 0.5;
  return p;
}

inline ProblemSpec preset_rarefaction() {
  ProblemSpec p;
  p.name = "burgers-rarefaction";
  p.kind = ProblemKind::scalar_conservation;
  p.initial = presets::rarefaction_initial;
  p.exact = presets::rarefaction_exact;
  p.final_time = 0.4;
  return p;
}

inline ProblemSpec preset_shock() {
  ProblemSpec p;
  p.name = "burgers-shock";
  p.kind = ProblemKind::scalar_conservation;
  p.initial = presets::shock_initial;
  p.exact = presets::shock_exact;
  p.final_time = 0.4;
  return p;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"rotating-gaussian", "rotating-shapes", "burgers-smooth",
                                                 "burgers-rarefaction", "burgers-shock"};
  return names;
}

inline ProblemSpec preset_by_name(const std::string& name) {
  if (name == "rotating-gaussian") return preset_rotating_gaussian();
  if (name == "rotating-shapes") return preset_rotating_shapes();
  if (name == "burgers-smooth") return preset_burgers_smooth();
  if (name == "burgers-rarefaction") return preset_rarefaction();
  if (name == "burgers-shock") return preset_shock();
  throw ConfigError("unknown problem '" + name + "'");
}

}  // namespace cifv
