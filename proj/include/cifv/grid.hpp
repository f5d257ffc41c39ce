#pragma once

// Uniform square-cell grid over a square domain and cell-centred scalar
// fields padded with two ghost layers.
//
// Interior cells use 1-based indices i, j = 1..M. Ghost cells use indices
// -1, 0 and M+1, M+2. The value stored in a cell is the point value at its
// centre, (x_lo + (i - 1/2) h, y_lo + (j - 1/2) h).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cifv/errors.hpp"

namespace cifv {

inline constexpr int kGhost = 2;

struct Grid {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  int M = 0;
  double h = 0.0;

  static constexpr int ghost = kGhost;

  double xc(int i) const { return x_lo + (i - 0.5) * h; }
  double yc(int j) const { return y_lo + (j - 0.5) * h; }
  /// x_{i+1/2}, the right edge of column i.
  double x_face(int i) const { return x_lo + i * h; }
  /// y_{j+1/2}, the top edge of row j.
  double y_face(int j) const { return y_lo + j * h; }

  int first_padded() const { return 1 - ghost; }
  int last_padded() const { return M + ghost; }
  int padded_extent() const { return M + 2 * ghost; }
  bool in_padded(int i, int j) const {
    return i >= first_padded() && i <= last_padded() && j >= first_padded() && j <= last_padded();
  }
  bool is_interior(int i, int j) const { return i >= 1 && i <= M && j >= 1 && j <= M; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline Grid make_grid(double x_lo, double x_hi, double y_lo, double y_hi, int M) {
  const double wx = x_hi - x_lo;
  const double wy = y_hi - y_lo;
  if (!(wx > 0.0)) throw ConfigError("grid: x_hi must exceed x_lo");
  if (std::abs(wy - wx) > 1e-12 * wx) throw ConfigError("grid: domain must be square");
  if (M < 4) throw ConfigError("grid: M must be at least 4, got " + std::to_string(M));
  return Grid{x_lo, x_hi, y_lo, y_hi, M, wx / M};
}

/// Dense storage over the padded index range of a grid with M interior cells
/// per axis. operator() is unchecked unless CIFV_CHECKED_ACCESS is defined;
/// at() always checks.
template <class T>
class PaddedArray {
 public:
  PaddedArray() = default;
  explicit PaddedArray(int M, T init = T{}) : M_(M), stride_(M + 2 * kGhost), data_(stride_ * stride_, init) {}

  int M() const { return M_; }

  T& operator()(int i, int j) {
#ifdef CIFV_CHECKED_ACCESS
    check(i, j);
#endif
    return data_[offset(i, j)];
  }
  const T& operator()(int i, int j) const {
#ifdef CIFV_CHECKED_ACCESS
    check(i, j);
#endif
    return data_[offset(i, j)];
  }

  T& at(int i, int j) {
    check(i, j);
    return data_[offset(i, j)];
  }
  const T& at(int i, int j) const {
    check(i, j);
    return data_[offset(i, j)];
  }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

 private:
  std::size_t offset(int i, int j) const {
    return static_cast<std::size_t>(j + kGhost - 1) * stride_ + static_cast<std::size_t>(i + kGhost - 1);
  }
  void check(int i, int j) const {
    const int lo = 1 - kGhost;
    const int hi = M_ + kGhost;
    if (i < lo || i > hi || j < lo || j > hi) {
      throw std::out_of_range("padded index (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    }
  }

  int M_ = 0;
  std::size_t stride_ = 0;
  std::vector<T> data_;
};

/// One scalar per cell, ghosts included, at a single time level.
struct CellField {
  Grid grid;
  PaddedArray<double> data;
  double time = 0.0;

  CellField() = default;
  explicit CellField(const Grid& g, double init = 0.0, double t = 0.0) : grid(g), data(g.M, init), time(t) {}

  double& operator()(int i, int j) { return data(i, j); }
  double operator()(int i, int j) const { return data(i, j); }
};

using PointFunction = std::function<double(double, double)>;
using SpaceTimeFunction = std::function<double(double, double, double)>;

namespace detail {
inline std::string cell_name(const Grid& g, int i, int j) {
  std::ostringstream os;
  os << "cell (" << i << "," << j << ") at (" << g.xc(i) << "," << g.yc(j) << ")";
  return os.str();
}
}  // namespace detail

inline CellField fill_from_function(const Grid& grid, const PointFunction& f, double t = 0.0) {
  CellField field(grid, 0.0, t);
  for (int j = grid.first_padded(); j <= grid.last_padded(); ++j) {
    for (int i = grid.first_padded(); i <= grid.last_padded(); ++i) {
      const double v = f(grid.xc(i), grid.yc(j));
      if (!std::isfinite(v)) throw EvaluationError("non-finite value at " + detail::cell_name(grid, i, j));
      field(i, j) = v;
    }
  }
  return field;
}

/// Sets both ghost layers to exact(centre, t); interior cells are untouched.
inline void fill_ghosts_dirichlet(CellField& field, const SpaceTimeFunction& exact, double t) {
  const Grid& g = field.grid;
  for (int j = g.first_padded(); j <= g.last_padded(); ++j) {
    for (int i = g.first_padded(); i <= g.last_padded(); ++i) {
      if (g.is_interior(i, j)) continue;
      const double v = exact(g.xc(i), g.yc(j), t);
      if (!std::isfinite(v)) throw EvaluationError("non-finite boundary value at " + detail::cell_name(g, i, j));
      field(i, j) = v;
    }
  }
}

inline bool all_finite(const CellField& field) {
  for (double v : field.data.raw()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with header `i,j,x,y,<column>`, interior cells only, j outer and i inner.
inline void write_array_csv(std::ostream& os, const Grid& g, const PaddedArray<double>& a,
                            const std::string& column = "u") {
  os << "i,j,x,y," << column << '\n';
  for (int j = 1; j <= g.M; ++j) {
    for (int i = 1; i <= g.M; ++i) {
      os << i << ',' << j << ',' << format_number(g.xc(i)) << ',' << format_number(g.yc(j)) << ','
         << format_number(a(i, j)) << '\n';
    }
  }
}

inline void write_field_csv(std::ostream& os, const CellField& field) { write_array_csv(os, field.grid, field.data); }

}  // namespace cifv
