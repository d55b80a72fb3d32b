#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace relev {

struct Exponential {
  double rate = 1.0;
};

/// Gamma with density x^{a-1} e^{-x/b} / (b^a Gamma(a)).
struct Gamma {
  double shape = 1.0;
  double scale = 1.0;
};

struct Weibull {
  double shape = 1.0;
  double scale = 1.0;
};

/// Cumulative hazard sin^2(t) on [0, pi/2], (pi/2)(t - pi/2) + 1 beyond.
/// NBU but not IFR.
struct StoyanovNBU {};

/// Cumulative hazard t^0.2 e^{1.1 t}; bathtub-shaped hazard, neither NBU nor NWU.
struct LaiXieNonMonotone {};

using Family = std::variant<Exponential, Gamma, Weibull, StoyanovNBU, LaiXieNonMonotone>;

struct NumericOptions {
  double quad_tol = 1e-8;
  /// Largest time the quantile bracketing search may reach.
  double bracket_bound = 1e12;
};

/// Survival below this threshold is treated as zero.
inline constexpr double kSurvivalFloor = 1e-300;

/// One unit's life law. Besides the base family it can carry two transforms,
/// both closed under the operations below:
///   - an age offset a: the residual life {X - a | X > a};
///   - a hazard multiplier c: hazard c * r(t) (generalized Yule entries).
/// Cumulative hazard of the transformed law is c * (H(t + a) - H(a)).
///
/// All members are pure functions of the value; instances are immutable.
class LifetimeDistribution {
 public:
  explicit LifetimeDistribution(Family family, NumericOptions options = {});

  static LifetimeDistribution exponential(double rate);
  static LifetimeDistribution gamma(double shape, double scale);
  static LifetimeDistribution weibull(double shape, double scale);
  static LifetimeDistribution stoyanov();
  static LifetimeDistribution lai_xie();

  const Family& family() const { return family_; }
  const NumericOptions& options() const { return options_; }
  double age() const { return age_; }
  double hazard_scale() const { return hazard_scale_; }

  double survival(double t) const;
  double density(double t) const;
  double hazard(double t) const;
  double cumulative_hazard(double t) const;

  /// Time t with F(t) = p.
  double quantile(double p) const;
  /// Time t with cumulative_hazard(t) = y.
  double inverse_cumulative_hazard(double y) const;

  /// Inverse-survival draw: returns t with survival(t) = u.
  double sample(double u) const;
  /// Draw from {X | X > s}: t with survival(t) / survival(s) = u, t > s.
  double sample_conditional_exceed(double u, double s) const;

  /// {X - a | X > a}.
  LifetimeDistribution residual(double a) const;
  /// Same law with every hazard value multiplied by `factor`.
  LifetimeDistribution scaled_hazard(double factor) const;

  /// Points in (0, inf) where the density is not smooth.
  std::vector<double> breakpoints() const;
  /// True when the density is unbounded at t = 0.
  bool singular_at_origin() const;

  /// Mini-grammar form (`gamma:shape=2,scale=1`), transforms appended as
  /// `;age=` and `;hazard_scale=`.
  std::string describe() const;

  bool operator==(const LifetimeDistribution& other) const;

 private:
  double base_cumulative_hazard(double x) const;
  double base_hazard(double x) const;
  double base_inverse_cumulative_hazard(double y) const;
  double bisect_base_inverse(double y) const;

  Family family_;
  NumericOptions options_;
  double age_ = 0.0;
  double hazard_scale_ = 1.0;
  double base_hazard_at_age_ = 0.0;  // H(age), cached
};

/// Parses `exp:rate=1`, `gamma:shape=2,scale=1`, `weibull:shape=2,scale=1`,
/// `stoyanov`, `laixie`. Throws ConfigError naming the offending token.
LifetimeDistribution parse_distribution(std::string_view text, NumericOptions options = {});

}  // namespace relev
