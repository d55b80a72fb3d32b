#include "chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace relev::detail {

double clenshaw(std::span<const double> b, double y) {
  double d1 = 0.0;
  double d2 = 0.0;
  for (std::size_t k = b.size(); k-- > 1;) {
    const double d = 2.0 * y * d1 - d2 + b[k];
    d2 = d1;
    d1 = d;
  }
  return y * d1 - d2 + (b.empty() ? 0.0 : b[0]);
}

ChebyshevBasis::ChebyshevBasis(std::size_t n) : n_(n), nodes_(n), cos_table_(4 * n) {
  const double pi = std::numbers::pi;
  for (std::size_t j = 0; j < n; ++j) {
    nodes_[j] = std::cos(pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n));
  }
  for (std::size_t i = 0; i < 4 * n; ++i) {
    cos_table_[i] = std::cos(pi * static_cast<double>(i) / (2.0 * static_cast<double>(n)));
  }
}

std::vector<double> ChebyshevBasis::coefficients(std::span<const double> values) const {
  std::vector<double> c(n_, 0.0);
  const std::size_t period = 4 * n_;
  for (std::size_t m = 0; m < n_; ++m) {
    double acc = 0.0;
    std::size_t idx = m % period;       // m (2j + 1) mod 4n, starting at j = 0
    const std::size_t step = (2 * m) % period;
    for (std::size_t j = 0; j < n_; ++j) {
      acc += values[j] * cos_table_[idx];
      idx += step;
      if (idx >= period) idx -= period;
    }
    c[m] = 2.0 * acc / static_cast<double>(n_);
  }
  return c;
}

std::vector<double> ChebyshevBasis::antiderivative(std::span<const double> c) {
  const std::size_t n = c.size();
  auto a = [&](std::size_t k) { return k < n ? c[k] : 0.0; };
  std::vector<double> b(n + 1, 0.0);
  double at_minus_one = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    b[k] = (a(k - 1) - a(k + 1)) / (2.0 * static_cast<double>(k));
    at_minus_one += (k % 2 == 0) ? b[k] : -b[k];
  }
  b[0] = -at_minus_one;
  return b;
}

}  // namespace relev::detail
