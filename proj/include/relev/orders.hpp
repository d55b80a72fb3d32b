#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "relev/curve.hpp"
#include "relev/distribution.hpp"
#include "relev/sequence.hpp"

namespace relev {

/// Tie tolerance for comparisons between exact curves.
inline constexpr double kExactTieTolerance = 1e-9;

enum class Relation { ALessB, BLessA, Equal, Crossing, Inconclusive };
enum class OrderKind { Stochastic, HazardRate, DynamicHazardRate, Cis };

const char* to_string(Relation r);
const char* to_string(OrderKind k);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A point where the two sides were evaluated. `s` is the conditioning time
/// for history or transition witnesses and NaN otherwise.
struct Witness {
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double s = std::numeric_limits<double>::quiet_NaN();
};

struct OrderVerdict {
  Relation relation = Relation::Inconclusive;
  /// Grid brackets [lo, hi] across which the signed difference changes sign
  /// beyond tolerance; nonempty exactly when relation is Crossing.
  std::vector<Interval> crossings;
  OrderKind order = OrderKind::Stochastic;
  double tolerance = 0.0;
  std::size_t grid_size = 0;
  std::vector<Witness> witnesses;
  /// Set when any input is a Monte Carlo estimate; the verdict then holds at
  /// the band's confidence level.
  bool statistical = false;
  /// Hazard-rate verdicts: whether the survival-ratio monotonicity check agrees.
  bool consistent = true;
};

/// The same verdict with the roles of A and B exchanged.
OrderVerdict swapped(const OrderVerdict& v);

nlohmann::json to_json(const OrderVerdict& v);

// ---------------------------------------------------------------------------
// Usual stochastic order

/// A <=_st B when A's survival lies below B's everywhere. Grids that differ
/// are resampled onto the merged grid over their common span; a common span
/// with fewer than two points is a DomainError.
///
/// Exact inputs: ties within kExactTieTolerance plus the curve tolerances;
/// differences that never leave the tie band give Equal. Empirical inputs use
/// the sum of the bands; a verdict needs a certified gap, otherwise
/// Inconclusive.
OrderVerdict st_compare(const SurvivalCurve& a, const SurvivalCurve& b);

/// The comparison behind st_compare on raw values at shared points: A <= B
/// when a_i <= b_i + margin everywhere, with the same tie and certification
/// rules. Used for counting-process comparisons where the points are counts.
OrderVerdict pointwise_compare(const std::vector<double>& points, const std::vector<double>& a,
                               const std::vector<double>& b, double margin, bool statistical);

using CurveOnGrid = std::function<SurvivalCurve(const std::vector<double>& grid)>;
using GridOfSize = std::function<std::vector<double>(std::size_t points)>;

struct RefinedVerdict {
  OrderVerdict verdict;  // at the finest grid evaluated
  std::vector<std::size_t> grid_sizes;
  std::vector<Relation> relations;  // one per grid size
  bool stable = false;
};

/// Doubles the grid from `start_points` until the relation repeats on two
/// successive refinements (three equal verdicts) or `max_points` is passed.
/// An unstable sequence reports Inconclusive.
RefinedVerdict st_compare_refined(const CurveOnGrid& a, const CurveOnGrid& b,
                                  const GridOfSize& grid, std::size_t start_points = 256,
                                  std::size_t max_points = 4096);

/// int_0^t (Fbar(t - x) - Fbar(t) / Fbar(x)) dF(x). Positive values mean the
/// two-unit relevation survives less than the two-unit renewal at t.
double nbu_relevation_integral(const LifetimeDistribution& d, double t);

// ---------------------------------------------------------------------------
// Hazard rate order

/// A <=_hr B when r_A >= r_B on the grid (tolerance 1e-9, relative for large
/// hazards). Points where either density is singular are skipped. The
/// verdict's `consistent` flag records whether log(Fbar_B / Fbar_A) moves
/// monotonically in the matching direction.
OrderVerdict hr_compare(const LifetimeDistribution& a, const LifetimeDistribution& b,
                        const std::vector<double>& grid);

// ---------------------------------------------------------------------------
// Dynamic hazard rate order over histories

struct History {
  std::vector<double> failed;  // ascending failure times
  double censor = 0.0;         // observation time, after the last failure

  /// Throws DomainError when times are not strictly ascending and positive or
  /// the censor time does not follow them.
  void validate() const;
};

/// `severe` is the history of the process claimed to fail sooner.
struct HistoryPair {
  History severe;
  History mild;
};

/// Throws DomainError naming the first violated clause: common censor time,
/// failure counts (severe >= mild), or componentwise x_k <= y_k.
void validate_severity(const HistoryPair& pair);

/// Seeded admissible pairs at censor time `t`. The first pair is always the
/// empty one; the severe history gets j ~ U{0..max_failures} failures and
/// the mild one i ~ U{0..j}.
std::vector<HistoryPair> history_pair_sampler(std::uint64_t seed, std::size_t count, double t,
                                              std::size_t max_failures);

/// Dynamic hazard comparison of the EPB arrivals (A, over `epb`) with the
/// renewal arrivals (B, over `replacement`).
///
/// ALessB: for every pair, the EPB under the severe history has hazard
/// s_{j+1}(t) at least the renewal's r_{i+1}(t - y_i) under the mild one.
/// BLessA: the same with the roles of the histories exchanged. Only pairs
/// with i = j constrain anything. Exceeding 1e-12 (relative above 1) counts
/// as a violation. When both directions fail the verdict is Crossing and the
/// interval spans the censor times of the two worst witnesses.
OrderVerdict dyn_hr_compare(const DistributionSequence& replacement,
                            const DistributionSequence& epb,
                            const std::vector<HistoryPair>& pairs);

// ---------------------------------------------------------------------------
// Conditional increase in sequence

/// Checks that Fbar_i(t) / Fbar_i(s) is nondecreasing in s <= t for arrivals
/// i = 2..n_max (tolerance 1e-12). ALessB means certified; a violation is
/// reported as Crossing with the offending s bracket.
OrderVerdict cis_check(const DistributionSequence& seq, std::size_t n_max,
                       const std::vector<double>& s_grid, const std::vector<double>& t_grid);

// ---------------------------------------------------------------------------
// Hypotheses of the coupling results

enum class HypothesisMode { Stochastic, HazardRate };

/// One comparison of X_n with the residual of Y_n at age t (t = 0 and n = 1
/// for the unconditioned first pair). Margins are the worst signed slack of
/// each inequality on the x grid; negative beyond tolerance means failure.
struct HypothesisCell {
  std::size_t n = 1;
  double t = 0.0;
  bool ge = false;  // X_n >= residual
  bool le = false;  // X_n <= residual
  double ge_margin = 0.0;
  double le_margin = 0.0;
};

struct HypothesesReport {
  HypothesisMode mode = HypothesisMode::Stochastic;
  std::vector<HypothesisCell> cells;
  bool all_ge = true;
  bool all_le = true;
  double tolerance = 0.0;
  std::vector<double> x_grid;
};

/// Compares X_1 with Y_1 and, for n = 2..n_max and every t in `t_grid`,
/// X_n with {Y_n - t | Y_n > t}, on `x_grid`.
HypothesesReport theorem_hypotheses_check(const DistributionSequence& x,
                                          const DistributionSequence& y, HypothesisMode mode,
                                          std::size_t n_max, const std::vector<double>& t_grid,
                                          const std::vector<double>& x_grid);

nlohmann::json to_json(const HypothesesReport& r);

}  // namespace relev
