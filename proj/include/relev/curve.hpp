#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "relev/distribution.hpp"

namespace relev {

struct ExactCurve {
  double tolerance = 0.0;
};

struct EmpiricalCurve {
  std::size_t replications = 0;
  double confidence = 0.0;  // 1 - delta
  double half_width = 0.0;
};

/// Survival function sampled on a strictly increasing, nonnegative grid.
struct SurvivalCurve {
  std::vector<double> grid;
  std::vector<double> values;
  std::variant<ExactCurve, EmpiricalCurve> kind;
  std::string label;

  bool is_exact() const { return std::holds_alternative<ExactCurve>(kind); }
  /// Tolerance for exact curves, DKW half-width for empirical ones.
  double band() const;
  double lower(std::size_t i) const;
  double upper(std::size_t i) const;
  std::size_t size() const { return grid.size(); }

  /// Throws DomainError when the grid or values violate the curve invariants.
  void validate() const;
};

/// DKW half-width sqrt(ln(2/delta) / (2 m)).
double dkw_half_width(std::size_t replications, double delta);

/// t = 0 followed by `points - 1` log-spaced times ending at `upper`, the first
/// at upper * 1e-3.
std::vector<double> log_grid(double upper, std::size_t points);
/// `points` equally spaced times on (0, upper].
std::vector<double> linear_grid(double upper, std::size_t points);
/// Default curve grid: log_grid up to the 0.999 quantile of `d`.
std::vector<double> default_grid(const LifetimeDistribution& d, std::size_t points = 256);

/// Piecewise-linear resampling onto `grid`; throws DomainError when `grid`
/// leaves the curve's span.
SurvivalCurve resample(const SurvivalCurve& curve, const std::vector<double>& grid);

}  // namespace relev
