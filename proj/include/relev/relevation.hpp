#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relev/curve.hpp"
#include "relev/distribution.hpp"
#include "relev/sequence.hpp"

namespace relev {

/// Abscissae where a conditioning survival below this is treated as singular.
/// Integrands are formed from hazards and exp(H(x) - H(t)), never from
/// 1 / Fbar, so only survival near double underflow is unusable.
inline constexpr double kSingularSurvival = 1e-250;

/// Survival of T # S at t: F(t) + G(t) * int_0^t dF(x) / G(x), computed by
/// adaptive quadrature and clamped to [0,1]. Throws NumericError naming the
/// first abscissa where G drops below kSingularSurvival inside [0, t].
double relevation_transform(const LifetimeDistribution& first, const LifetimeDistribution& second,
                            double t);

/// Survival of X + Y for independent X ~ first, Y ~ second:
/// Fbar(t) + int_0^t Gbar(t - x) dF(x).
double convolution_survival(const LifetimeDistribution& first,
                            const LifetimeDistribution& second, double t);

/// Marginal survival of the n-th EPB arrival on `grid`.
///
/// The recursion Gbar_n(t) = Gbar_{n-1}(t) + Fbar_n(t) int_0^t dG_{n-1}(x)/Fbar_n(x)
/// is carried in density form: with I_1 = 1 and
///   I_k(t) = int_0^t f_{k-1}(x) I_{k-1}(x) / Fbar_k(x) dx,
/// the n-th arrival has density f_n I_n and survival
///   Gbar_n = Fbar_1 + sum_{k=2}^n Fbar_k I_k.
/// Each I_k is held as a piecewise Chebyshev series (power-mapped first panel,
/// panels split at density breakpoints); the node count doubles until the
/// result is stable.
SurvivalCurve epb_marginal(const DistributionSequence& seq, std::size_t n,
                           const std::vector<double>& grid);

/// Density of the n-th EPB arrival on `grid` (same engine as epb_marginal).
std::vector<double> epb_marginal_density(const DistributionSequence& seq, std::size_t n,
                                         const std::vector<double>& grid);

/// Closed form for iid entries: Fbar(t) sum_{k<n} H(t)^k / k!.
double minimal_repair_marginal(const LifetimeDistribution& d, std::size_t n, double t);

/// Joint density of (T_1, ..., T_n) at 0 < t_1 < ... < t_n:
/// prod_{i<n} f_i(t_i) / Fbar_{i+1}(t_i) * f_n(t_n), which reduces to
/// prod_{i<n} r(t_i) * f(t_n) for identical entries. Unordered input is a DomainError.
double epb_joint_density(const DistributionSequence& seq, std::span<const double> times);

}  // namespace relev
