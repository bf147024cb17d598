#pragma once

#include <stdexcept>
#include <string>

namespace kqw {

/// Invalid wire, lead or run configuration. `line()` is 0 when the error
/// does not come from a parsed config file.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Eigensolver failure, singular propagator, quadrature non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The computed spectrum breaks particle-hole symmetry beyond tolerance.
class SymmetryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kqw
