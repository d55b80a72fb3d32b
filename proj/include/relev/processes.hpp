#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relev/curve.hpp"
#include "relev/distribution.hpp"
#include "relev/sequence.hpp"

namespace relev {

/// Failed unit replaced by an independent unit of the same age drawn from F_n
/// (EPB arrivals: T_n | T_{n-1} = s ~ {X_n | X_n > s}).
struct RelevationPolicy {
  DistributionSequence seq;
};

/// Failed unit replaced by a new one: T'_n = X_1 + ... + X_n.
struct RenewalPolicy {
  DistributionSequence seq;
};

/// Relevation with identical units.
struct MinimalRepairPolicy {
  LifetimeDistribution law;
};

/// Generalized Yule: from n - 1 to n arrivals at intensity (n + offset) r(t),
/// r the hazard of `base`.
struct YulePolicy {
  LifetimeDistribution base;
  double offset = 1.0;
};

/// Unit replaced at failure or at age `interval`, whichever comes first;
/// only failures are recorded.
struct AgeReplacementPolicy {
  LifetimeDistribution law;
  double interval = 1.0;
};

using ProcessKind = std::variant<RelevationPolicy, RenewalPolicy, MinimalRepairPolicy, YulePolicy,
                                 AgeReplacementPolicy>;

struct ProcessSpec {
  ProcessKind kind;

  /// Short policy name: relevation, renewal, minimal-repair, yule, age.
  std::string name() const;
  /// Name plus parameters, used to tag paths and echo configs.
  std::string id() const;
};

struct ArrivalPath {
  std::vector<double> times;
  std::string spec_id;
  std::uint64_t replication = 0;
  std::uint64_t seed = 0;
  /// Set for horizon-stopped paths: every arrival <= horizon is present.
  std::optional<double> horizon;
};

/// Source of uniforms for policies that consume an unbounded number of draws.
using UniformSource = std::function<double()>;

/// One path driven by explicit uniforms, u_i feeding arrival i. Age replacement
/// consumes the uniforms cycle by cycle and throws TruncationError when they
/// run out before `n_arrivals` failures.
ArrivalPath simulate_path(const ProcessSpec& spec, std::size_t n_arrivals,
                          std::span<const double> uniforms);

/// Age-replacement failures up to `horizon`: each cycle draws X; X < K records
/// a failure at clock + X, otherwise the clock advances by K with no failure.
ArrivalPath simulate_age_replacement_failures(const LifetimeDistribution& law, double interval,
                                              double horizon, const UniformSource& uniforms);
/// Count-stopped variant: runs until `n_failures` failures are recorded.
ArrivalPath simulate_age_replacement_count(const LifetimeDistribution& law, double interval,
                                           std::size_t n_failures, const UniformSource& uniforms);

/// Renewal path over `replacement` and EPB path over `epb`, both driven by the
/// same uniforms (u_i feeds arrival i of each).
std::pair<ArrivalPath, ArrivalPath> simulate_coupled_paths(const DistributionSequence& replacement,
                                                           const DistributionSequence& epb,
                                                           std::size_t n_arrivals,
                                                           std::span<const double> uniforms);

// ---------------------------------------------------------------------------
// Replication engine

struct SimulationRequest {
  ProcessSpec spec;
  std::size_t arrivals = 1;       // count-based stop
  std::optional<double> horizon;  // horizon-based stop when set
  std::size_t replications = 1;
  std::uint64_t seed = 0;
};

/// Replication `rep` of a request. Uniforms come from the counter-based stream
/// keyed by (seed, rep); arrival i uses draw i - 1.
ArrivalPath simulate_replication(const SimulationRequest& request, std::uint64_t rep);

/// Reference implementation: replications in index order on one thread.
std::vector<ArrivalPath> simulate_serial(const SimulationRequest& request);
/// OpenMP kernel; bit-identical to simulate_serial for any thread count.
/// `threads == 0` uses the OpenMP default.
std::vector<ArrivalPath> simulate_parallel(const SimulationRequest& request, int threads = 0);

struct CoupledPaths {
  std::vector<ArrivalPath> replacement;  // T'
  std::vector<ArrivalPath> epb;          // T
};

CoupledPaths simulate_coupled_serial(const DistributionSequence& replacement,
                                     const DistributionSequence& epb, std::size_t arrivals,
                                     std::size_t replications, std::uint64_t seed);
CoupledPaths simulate_coupled_parallel(const DistributionSequence& replacement,
                                       const DistributionSequence& epb, std::size_t arrivals,
                                       std::size_t replications, std::uint64_t seed,
                                       int threads = 0);

enum class Dominance { EpbBelow, EpbAbove };

struct DominanceReport {
  std::size_t paths = 0;
  std::size_t violating_paths = 0;
  double worst_excess = 0.0;  // largest violation, 0 when none
  std::uint64_t worst_replication = 0;
};

/// Checks T_i <= T'_i (EpbBelow) or T_i >= T'_i (EpbAbove) on every coupled
/// path and arrival, allowing `relative_slack` of inversion round-off.
DominanceReport check_dominance(const CoupledPaths& paths, Dominance direction,
                                double relative_slack = 1e-10);

// ---------------------------------------------------------------------------
// Counting and empirical curves

/// N(t) per path. A count-stopped path whose arrivals are exhausted by t has
/// an unknown count and raises TruncationError unless `saturate` is set, in
/// which case the simulated arrival count is returned.
std::vector<std::size_t> count_at(std::span<const ArrivalPath> paths, double t,
                                  bool saturate = false);

/// Empirical survival of T_n on `grid` with DKW half-width for `delta`.
SurvivalCurve empirical_survival(std::span<const ArrivalPath> paths, std::size_t n,
                                 const std::vector<double>& grid, double delta);

/// Curves for arrivals 1..n_max.
std::vector<SurvivalCurve> empirical_curve_set(std::span<const ArrivalPath> paths,
                                               std::size_t n_max, const std::vector<double>& grid,
                                               double delta);

/// Number of (path, n, t) triples where {N(t) < n} and {T_n > t} disagree.
std::size_t duality_violations(std::span<const ArrivalPath> paths,
                               const std::vector<double>& grid);

}  // namespace relev
