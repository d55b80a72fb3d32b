#include "relev/relevation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "chebyshev.hpp"
#include "relev/errors.hpp"
#include "relev/quadrature.hpp"

namespace relev {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Abscissa where `d`'s survival first drops below kSingularSurvival.
double singular_abscissa(const LifetimeDistribution& d) {
  return d.inverse_cumulative_hazard(-std::log(kSingularSurvival));
}

void guard_conditioning(const LifetimeDistribution& d, double t, const char* role) {
  if (d.survival(t) < kSingularSurvival) {
    throw NumericError(std::string("integrand singular: survival of ") + role + " " +
                       d.describe() + " falls below " + num(kSingularSurvival) + " at x=" + num(singular_abscissa(d)) +
                       " inside [0, " + num(t) + "]");
  }
}

std::vector<double> merged_breakpoints(std::initializer_list<const LifetimeDistribution*> laws) {
  std::vector<double> out;
  for (const auto* d : laws) {
    for (double b : d->breakpoints()) out.push_back(b);
  }
  return out;
}

}  // namespace

double relevation_transform(const LifetimeDistribution& first, const LifetimeDistribution& second,
                            double t) {
  if (!(t >= 0.0)) throw DomainError("relevation time must be >= 0");
  if (t == 0.0) return 1.0;
  guard_conditioning(second, t, "second");

  const double h_t = second.cumulative_hazard(t);
  QuadratureOptions opts;
  opts.abs_tol = first.options().quad_tol;
  opts.singular_at_lower = first.singular_at_origin();
  opts.breakpoints = merged_breakpoints({&first, &second});
  // Gbar(t) / Gbar(x) folded into the integrand as exp(H(x) - H(t)).
  const double integral = integrate(
      [&](double x) {
        const double f = first.density(x);
        return f == 0.0 ? 0.0 : f * std::exp(second.cumulative_hazard(x) - h_t);
      },
      0.0, t, opts);
  return std::clamp(first.survival(t) + integral, 0.0, 1.0);
}

double convolution_survival(const LifetimeDistribution& first,
                            const LifetimeDistribution& second, double t) {
  if (!(t >= 0.0)) throw DomainError("convolution time must be >= 0");
  if (t == 0.0) return 1.0;
  // Split at t/2 so each half has at most one nonsmooth end at its lower limit:
  // f near x = 0, and Gbar(t - x) near x = t when the second law is singular.
  const double mid = 0.5 * t;
  auto integrand = [&](double x) { return second.survival(std::max(t - x, 0.0)) * first.density(x); };
  QuadratureOptions head;
  head.abs_tol = 0.5 * first.options().quad_tol;
  head.singular_at_lower = first.singular_at_origin();
  head.breakpoints = first.breakpoints();
  for (double b : second.breakpoints()) head.breakpoints.push_back(t - b);
  QuadratureOptions tail = head;
  tail.singular_at_lower = second.singular_at_origin();
  for (double& b : tail.breakpoints) b = t - b;
  const double integral =
      integrate(integrand, 0.0, mid, head) +
      integrate([&](double s) { return integrand(t - s); }, 0.0, t - mid, tail);
  return std::clamp(first.survival(t) + integral, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// EPB marginal engine

namespace {

constexpr int kPanelPower = 5;
constexpr std::size_t kMinNodes = 16;
constexpr std::size_t kMaxNodes = 4096;
constexpr double kStableDiff = 1e-10;

struct Panel {
  double lo;
  double hi;
  bool mapped;  // x = lo + (hi - lo) ((y + 1)/2)^5

  double x(double y) const {
    if (mapped) return lo + (hi - lo) * std::pow(0.5 * (y + 1.0), kPanelPower);
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * y;
  }
  double dx_dy(double y) const {
    if (mapped) return (hi - lo) * kPanelPower * 0.5 * std::pow(0.5 * (y + 1.0), kPanelPower - 1);
    return 0.5 * (hi - lo);
  }
  double y(double x) const {
    const double frac = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
    if (mapped) return 2.0 * std::pow(frac, 1.0 / kPanelPower) - 1.0;
    return 2.0 * frac - 1.0;
  }
};

/// One antiderivative level I_k as a piecewise Chebyshev series.
struct Level {
  std::vector<std::vector<double>> series;  // per panel
  std::vector<double> offsets;              // I_k at each panel's left end
};

class EpbSolver {
 public:
  EpbSolver(const DistributionSequence& seq, std::size_t n, double horizon) : horizon_(horizon) {
    if (n == 0) throw DomainError("arrival index must be >= 1");
    for (std::size_t k = 1; k <= n; ++k) laws_.push_back(seq.nth(k));
    if (n == 1 || horizon_ <= 0.0) return;

    for (std::size_t k = 2; k <= n; ++k) guard_conditioning(laws_[k - 1], horizon_, "entry");
    build_panels();

    std::vector<double> probes;
    for (int i = 1; i <= 64; ++i) probes.push_back(horizon_ * i / 64.0);
    std::vector<double> previous;
    for (std::size_t nodes = kMinNodes; nodes <= kMaxNodes; nodes *= 2) {
      solve(nodes);
      std::vector<double> current;
      for (double t : probes) current.push_back(survival(t));
      if (!previous.empty()) {
        double diff = 0.0;
        for (std::size_t i = 0; i < current.size(); ++i) {
          diff = std::max(diff, std::abs(current[i] - previous[i]));
        }
        last_diff_ = diff;
        if (diff <= kStableDiff) return;
      }
      previous = std::move(current);
    }
    if (last_diff_ > 0.1 * tolerance()) {
      throw NumericError("EPB marginal recursion did not converge: change " + num(last_diff_) +
                         " at " + std::to_string(kMaxNodes) + " Chebyshev nodes");
    }
  }

  double tolerance() const { return static_cast<double>(laws_.size()) * 1e-7; }

  double survival(double t) const {
    double s = laws_[0].survival(t);
    for (std::size_t k = 2; k <= laws_.size(); ++k) {
      if (t > 0.0) s += laws_[k - 1].survival(t) * antiderivative(k, t);
    }
    return std::clamp(s, 0.0, 1.0);
  }

  double density(double t) const {
    const std::size_t n = laws_.size();
    const double f = laws_[n - 1].density(t);
    if (n == 1 || f == 0.0) return f;
    return f * antiderivative(n, t);
  }

 private:
  void build_panels() {
    std::vector<double> cuts;
    for (const auto& d : laws_) {
      for (double b : d.breakpoints()) {
        if (b > 0.0 && b < horizon_) cuts.push_back(b);
      }
    }
    // I_k grows like exp(H_k); cutting wherever a conditioning H_k gains 1
    // keeps the growth inside any panel below a factor e.
    for (std::size_t k = 1; k < laws_.size(); ++k) {
      const auto& d = laws_[k];
      const double top = d.cumulative_hazard(horizon_);
      for (double level = 1.0; level < top; level += 1.0) cuts.push_back(d.inverse_cumulative_hazard(level));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double a, double b) { return b - a <= 1e-9 * horizon_; }),
               cuts.end());
    double first = horizon_ / 8.0;
    if (!cuts.empty()) first = std::min(first, cuts.front());
    panels_.push_back({0.0, first, true});
    double lo = first;
    for (double c : cuts) {
      if (c > lo) {
        panels_.push_back({lo, c, false});
        lo = c;
      }
    }
    if (horizon_ > lo) panels_.push_back({lo, horizon_, false});
  }

  void solve(std::size_t nodes) {
    const detail::ChebyshevBasis basis(nodes);
    const auto& ys = basis.nodes();
    const std::size_t n = laws_.size();
    levels_.assign(n + 1, Level{});

    // I_{k-1} at the nodes of every panel; I_1 = 1.
    std::vector<std::vector<double>> prev(panels_.size(), std::vector<double>(nodes, 1.0));
    std::vector<double> q(nodes);
    for (std::size_t k = 2; k <= n; ++k) {
      const LifetimeDistribution& upstream = laws_[k - 2];
      const LifetimeDistribution& current = laws_[k - 1];
      Level& level = levels_[k];
      double offset = 0.0;
      for (std::size_t p = 0; p < panels_.size(); ++p) {
        const Panel& panel = panels_[p];
        for (std::size_t j = 0; j < nodes; ++j) {
          const double x = panel.x(ys[j]);
          const double f = upstream.density(x);
          q[j] = f == 0.0 ? 0.0 : f * prev[p][j] / current.survival(x) * panel.dx_dy(ys[j]);
          if (!std::isfinite(q[j])) {
            throw NumericError("EPB recursion integrand not finite at x=" + num(x));
          }
        }
        std::vector<double> b = detail::ChebyshevBasis::antiderivative(basis.coefficients(q));
        for (std::size_t j = 0; j < nodes; ++j) prev[p][j] = offset + detail::clenshaw(b, ys[j]);
        level.offsets.push_back(offset);
        offset += detail::clenshaw(b, 1.0);
        level.series.push_back(std::move(b));
      }
    }
  }

  double antiderivative(std::size_t k, double x) const {
    const Level& level = levels_[k];
    std::size_t p = 0;
    while (p + 1 < panels_.size() && x > panels_[p].hi) ++p;
    return level.offsets[p] + detail::clenshaw(level.series[p], panels_[p].y(x));
  }

  double horizon_;
  std::vector<LifetimeDistribution> laws_;
  std::vector<Panel> panels_;
  std::vector<Level> levels_;
  double last_diff_ = 0.0;
};

double grid_horizon(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw DomainError("grid times must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
  }
  return grid.back();
}

}  // namespace

SurvivalCurve epb_marginal(const DistributionSequence& seq, std::size_t n,
                           const std::vector<double>& grid) {
  const EpbSolver solver(seq, n, grid_horizon(grid));
  SurvivalCurve curve;
  curve.grid = grid;
  curve.values.reserve(grid.size());
  for (double t : grid) curve.values.push_back(solver.survival(t));
  curve.kind = ExactCurve{solver.tolerance()};
  curve.label = "epb n=" + std::to_string(n);
  return curve;
}

std::vector<double> epb_marginal_density(const DistributionSequence& seq, std::size_t n,
                                         const std::vector<double>& grid) {
  const EpbSolver solver(seq, n, grid_horizon(grid));
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(solver.density(t));
  return out;
}

double minimal_repair_marginal(const LifetimeDistribution& d, std::size_t n, double t) {
  if (n == 0) throw DomainError("arrival index must be >= 1");
  const double h = d.cumulative_hazard(t);
  if (h == 0.0) return 1.0;
  const double log_h = std::log(h);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    s += std::exp(kk * log_h - h - std::lgamma(kk + 1.0));
  }
  return std::clamp(s, 0.0, 1.0);
}

double epb_joint_density(const DistributionSequence& seq, std::span<const double> times) {
  if (times.empty()) throw DomainError("joint density needs at least one time");
  if (!(times[0] > 0.0)) throw DomainError("arrival times must be positive");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw DomainError("arrival times must be strictly increasing (position " +
                        std::to_string(i + 1) + ")");
    }
  }
  // T_{i+1} | T_i = s has density f_{i+1}(t) / Fbar_{i+1}(s), so each step
  // conditions on the next entry's survival.
  double value = 1.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    value *= seq.nth(i + 1).density(times[i]) / seq.nth(i + 2).survival(times[i]);
  }
  return value * seq.nth(times.size()).density(times.back());
}

}  // namespace relev
