#include "relev/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "relev/errors.hpp"

namespace relev {

namespace {

constexpr int kSingularPower = 5;

struct Interval {
  double lo;
  double hi;
  double value;
  double error;
  bool mapped;  // integrates the substituted integrand over v in [lo, hi]
  bool operator<(const Interval& other) const { return error < other.error; }
};

class Integrand {
 public:
  Integrand(const std::function<double(double)>& f, double a, double b)
      : f_(f), a_(a), width_(b - a) {}

  double operator()(double x, bool mapped) const {
    double y;
    if (mapped) {
      const double v4 = std::pow(x, kSingularPower - 1);
      const double arg = a_ + width_ * v4 * x;
      y = f_(arg) * width_ * kSingularPower * v4;
      if (!std::isfinite(y)) fail(arg);
    } else {
      y = f_(x);
      if (!std::isfinite(y)) fail(x);
    }
    return y;
  }

 private:
  [[noreturn]] static void fail(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    throw NumericError(std::string("integrand not finite at x=") + buf);
  }

  const std::function<double(double)>& f_;
  double a_;
  double width_;
};

Interval kronrod(const Integrand& f, double lo, double hi, bool mapped) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  static const auto& nodes = GK::abscissa();
  static const auto& kweights = GK::weights();
  // Embedded 10-point Gauss nodes are the odd Kronrod abscissae.
  static const auto& gweights = boost::math::quadrature::gauss<double, 10>::weights();

  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f0 = f(centre, mapped);
  double kronrod_sum = f0 * kweights[0];
  double gauss_sum = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dx = half * nodes[i];
    const double pair = f(centre - dx, mapped) + f(centre + dx, mapped);
    kronrod_sum += kweights[i] * pair;
    if (i % 2 == 1) gauss_sum += gweights[i / 2] * pair;
  }
  const double value = half * kronrod_sum;
  const double error = std::abs(value - half * gauss_sum);
  return {lo, hi, value, error, mapped};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
  QuadratureResult result;
  if (!(b > a)) {
    result.converged = (a == b);
    return result;
  }

  std::vector<double> cuts{a};
  for (double p : options.breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const Integrand first(f, cuts[0], cuts[1]);
  const Integrand rest(f, a, b);
  auto eval = [&](const Interval& iv, double lo, double hi) {
    return iv.mapped ? kronrod(first, lo, hi, true) : kronrod(rest, lo, hi, false);
  };

  std::priority_queue<Interval> heap;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (i == 0 && options.singular_at_lower) {
      heap.push(kronrod(first, 0.0, 1.0, true));
    } else {
      heap.push(kronrod(rest, cuts[i], cuts[i + 1], false));
    }
  }

  auto totals = [&heap]() {
    double value = 0.0;
    double error = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
    return std::pair{value, error};
  };

  auto [value, error] = totals();
  while (error > std::max(options.abs_tol, options.rel_tol * std::abs(value)) &&
         heap.size() < options.max_intervals) {
    const Interval worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) break;
    heap.pop();
    const Interval left = eval(worst, worst.lo, mid);
    const Interval right = eval(worst, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  std::tie(value, error) = totals();  // resum to shed accumulated rounding
  result.value = value;
  result.error = error;
  result.intervals = heap.size();
  result.converged = error <= std::max(options.abs_tol, options.rel_tol * std::abs(value));
  return result;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options) {
  const QuadratureResult r = integrate_adaptive(f, a, b, options);
  if (!r.converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "quadrature on [%.6g, %.6g] did not converge: error estimate %.3g after %zu "
                  "intervals",
                  a, b, r.error, r.intervals);
    throw NumericError(buf);
  }
  return r.value;
}

}  // namespace relev
