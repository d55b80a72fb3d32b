#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace relev {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  std::size_t max_intervals = std::size_t{1} << 14;
  /// Integrable blow-up at the lower limit (densities like x^{-0.8}). The first
  /// segment is integrated after substituting x = a + (b - a) v^5.
  bool singular_at_lower = false;
  /// Interior points where the integrand has a kink or jump.
  std::vector<double> breakpoints;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive 21-point Gauss-Kronrod: the interval with the largest
/// error estimate is bisected until the summed estimate is below
/// max(abs_tol, rel_tol * |value|) or the interval cap is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

/// As integrate_adaptive, but throws NumericError when not converged.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options = {});

}  // namespace relev
