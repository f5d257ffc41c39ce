#pragma once

#include <stdexcept>
#include <string>

namespace cifv {

/// Invalid grid, problem or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A user-supplied function (initial data, exact solution, flux) produced a
/// non-finite value or failed to evaluate.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The per-cell nonlinear solve or a sweep failed.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation called on a problem type it does not support.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cifv
