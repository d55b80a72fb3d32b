#pragma once

// Chebyshev interpolation at first-kind nodes and spectral antiderivatives.

#include <cstddef>
#include <span>
#include <vector>

namespace relev::detail {

/// sum_{k=0}^{M} b_k T_k(y) by Clenshaw recurrence.
double clenshaw(std::span<const double> b, double y);

class ChebyshevBasis {
 public:
  explicit ChebyshevBasis(std::size_t n);

  std::size_t size() const { return n_; }
  /// y_j = cos(pi (j + 1/2) / n), j = 0..n-1 (descending in y).
  const std::vector<double>& nodes() const { return nodes_; }

  /// Coefficients c with f ~ c_0/2 + sum_{m>=1} c_m T_m from values at nodes().
  std::vector<double> coefficients(std::span<const double> values) const;

  /// Antiderivative coefficients b (length n + 1, full-weight b_0) of the
  /// interpolant with coefficients `c`, normalised so the integral vanishes at
  /// y = -1.
  static std::vector<double> antiderivative(std::span<const double> c);

 private:
  std::size_t n_;
  std::vector<double> nodes_;
  std::vector<double> cos_table_;  // cos(pi i / (2n)), i in [0, 4n)
};

}  // namespace relev::detail
