#include "relev/curve.hpp"

#include <algorithm>
#include <cmath>

#include "relev/errors.hpp"

namespace relev {

double SurvivalCurve::band() const {
  if (const auto* e = std::get_if<ExactCurve>(&kind)) return e->tolerance;
  return std::get<EmpiricalCurve>(kind).half_width;
}

double SurvivalCurve::lower(std::size_t i) const { return std::max(0.0, values.at(i) - band()); }
double SurvivalCurve::upper(std::size_t i) const { return std::min(1.0, values.at(i) + band()); }

void SurvivalCurve::validate() const {
  if (grid.size() != values.size()) throw DomainError("curve grid and values differ in length");
  if (grid.empty()) throw DomainError("curve is empty");
  if (grid.front() < 0.0) throw DomainError("curve grid must be nonnegative");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("curve grid must be strictly increasing");
  }
  const double slack = band();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= -slack && values[i] <= 1.0 + slack)) {
      throw DomainError("curve value outside [0,1]");
    }
    if (i > 0 && values[i] > values[i - 1] + 2.0 * slack + 1e-15) {
      throw DomainError("curve increases beyond its tolerance");
    }
  }
  if (is_exact() && grid.front() == 0.0 && std::abs(values.front() - 1.0) > slack + 1e-15) {
    throw DomainError("exact survival curve must start at 1");
  }
}

double dkw_half_width(std::size_t replications, double delta) {
  if (replications == 0) throw DomainError("DKW band needs at least one replication");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("confidence delta must lie in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(replications)));
}

std::vector<double> log_grid(double upper, std::size_t points) {
  if (!(upper > 0.0) || points < 2) throw DomainError("log grid needs upper > 0 and >= 2 points");
  std::vector<double> grid{0.0};
  const double lo = std::log(upper * 1e-3);
  const double hi = std::log(upper);
  const std::size_t m = points - 1;
  for (std::size_t i = 0; i < m; ++i) {
    const double frac = m == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(m - 1);
    grid.push_back(std::exp(lo + frac * (hi - lo)));
  }
  grid.back() = upper;
  return grid;
}

std::vector<double> linear_grid(double upper, std::size_t points) {
  if (!(upper > 0.0) || points < 1) throw DomainError("linear grid needs upper > 0");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = upper * static_cast<double>(i + 1) / static_cast<double>(points);
  }
  return grid;
}

std::vector<double> default_grid(const LifetimeDistribution& d, std::size_t points) {
  return log_grid(d.quantile(0.999), points);
}

SurvivalCurve resample(const SurvivalCurve& curve, const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("resample target grid is empty");
  const double lo = curve.grid.front();
  const double hi = curve.grid.back();
  if (grid.front() < lo - 1e-12 || grid.back() > hi + 1e-12) {
    throw DomainError("target grid leaves the curve span; grids are incompatible");
  }
  SurvivalCurve out;
  out.grid = grid;
  out.kind = curve.kind;
  out.label = curve.label;
  out.values.reserve(grid.size());
  for (double t : grid) {
    const auto it = std::lower_bound(curve.grid.begin(), curve.grid.end(), t);
    if (it == curve.grid.end()) {
      out.values.push_back(curve.values.back());
      continue;
    }
    const auto j = static_cast<std::size_t>(it - curve.grid.begin());
    if (*it == t || j == 0) {
      out.values.push_back(curve.values[j]);
      continue;
    }
    const double t0 = curve.grid[j - 1];
    const double t1 = curve.grid[j];
    const double w = (t - t0) / (t1 - t0);
    out.values.push_back((1.0 - w) * curve.values[j - 1] + w * curve.values[j]);
  }
  return out;
}

}  // namespace relev
