#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kqw {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_panels = 20000;
};

struct QuadratureResult {
  std::vector<double> value;
  /// Integral of |f_k|, used as the scale for the relative tolerance.
  std::vector<double> abs_value;
  double error = 0.0;
  int evaluations = 0;
  int panels = 0;
};

/// Writes f(x) into the output span (one entry per component).
using VectorIntegrand = std::function<void(double, std::span<double>)>;

/// Globally adaptive 21-point Gauss-Kronrod integration of a vector-valued
/// function over [a, b]. Interior breakpoints start the panel set; the panel
/// with the largest error estimate is bisected until the summed error is
/// below max(abs_tol, rel_tol * sum_k |f_k|_1). Throws NumericalError when
/// max_panels is reached first.
QuadratureResult integrate(const VectorIntegrand& f, int components, double a, double b,
                           std::span<const double> breakpoints, const QuadratureSpec& spec);

}  // namespace kqw
