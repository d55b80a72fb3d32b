#include "relev/processes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <string>

#include <omp.h>

#include "relev/errors.hpp"
#include "relev/rng.hpp"

namespace relev {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::size_t kHorizonArrivalCap = 10'000'000;

/// Non-age policies reduce to a sequence plus a transition rule.
struct ArrivalModel {
  DistributionSequence seq;
  bool conditional;  // true: T_i ~ {X_i | X_i > T_{i-1}}; false: T_i = T_{i-1} + X_i

  double step(std::size_t i, double previous, double u) const {
    const LifetimeDistribution law = seq.nth(i);
    if (i == 1) return law.sample(u);
    return conditional ? law.sample_conditional_exceed(u, previous) : previous + law.sample(u);
  }
};

std::optional<ArrivalModel> arrival_model(const ProcessSpec& spec) {
  return std::visit(
      Overloaded{
          [](const RelevationPolicy& p) { return std::optional{ArrivalModel{p.seq, true}}; },
          [](const RenewalPolicy& p) { return std::optional{ArrivalModel{p.seq, false}}; },
          [](const MinimalRepairPolicy& p) {
            return std::optional{ArrivalModel{DistributionSequence::iid(p.law), true}};
          },
          [](const YulePolicy& p) {
            return std::optional{ArrivalModel{DistributionSequence::yule(p.base, p.offset), true}};
          },
          [](const AgeReplacementPolicy&) { return std::optional<ArrivalModel>{}; },
      },
      spec.kind);
}

void require_interval(double interval) {
  if (!(interval > 0.0) || !std::isfinite(interval)) {
    throw DomainError("age replacement interval must be positive");
  }
}

template <class Stop>
ArrivalPath run_age_replacement(const LifetimeDistribution& law, double interval,
                                const UniformSource& uniforms, Stop stop) {
  require_interval(interval);
  ArrivalPath path;
  double clock = 0.0;
  while (true) {
    const double x = law.sample(uniforms());
    if (x < interval) {
      if (stop(clock + x, path.times.size())) break;
      path.times.push_back(clock + x);
      clock += x;
    } else {
      clock += interval;
      if (stop(clock, path.times.size())) break;
    }
  }
  return path;
}

ArrivalPath replicate(const SimulationRequest& request, const std::string& id, std::uint64_t rep) {
  UniformStream stream(request.seed, rep);
  ArrivalPath path;
  if (const auto* age = std::get_if<AgeReplacementPolicy>(&request.spec.kind)) {
    const UniformSource source = [&stream] { return stream.next(); };
    path = request.horizon
               ? simulate_age_replacement_failures(age->law, age->interval, *request.horizon, source)
               : simulate_age_replacement_count(age->law, age->interval, request.arrivals, source);
  } else {
    const ArrivalModel model = *arrival_model(request.spec);
    double t = 0.0;
    if (request.horizon) {
      for (std::size_t i = 1;; ++i) {
        if (i > kHorizonArrivalCap) throw NumericError("horizon path exceeded arrival cap");
        t = model.step(i, t, stream.at(static_cast<std::uint32_t>(i - 1)));
        if (t > *request.horizon) break;
        path.times.push_back(t);
      }
      path.horizon = request.horizon;
    } else {
      path.times.reserve(request.arrivals);
      for (std::size_t i = 1; i <= request.arrivals; ++i) {
        t = model.step(i, t, stream.at(static_cast<std::uint32_t>(i - 1)));
        path.times.push_back(t);
      }
    }
  }
  path.spec_id = id;
  path.replication = rep;
  path.seed = request.seed;
  return path;
}

void validate_request(const SimulationRequest& request) {
  if (request.replications == 0) throw DomainError("replications must be >= 1");
  if (!request.horizon && request.arrivals == 0) throw DomainError("n_arrivals must be >= 1");
  if (request.horizon && !(*request.horizon > 0.0)) throw DomainError("horizon must be > 0");
}

/// Runs body(i) for i in [0, count) on an OpenMP team, rethrowing the first
/// exception after the loop.
template <class Body>
void parallel_for(std::size_t count, int threads, Body body) {
  std::exception_ptr failure;
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 256) num_threads(team)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(relev_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string coupled_id(const DistributionSequence& seq, const char* role) {
  return std::string(role) + " " + seq.describe();
}

}  // namespace

std::string ProcessSpec::name() const {
  return std::visit(Overloaded{
                        [](const RelevationPolicy&) { return std::string("relevation"); },
                        [](const RenewalPolicy&) { return std::string("renewal"); },
                        [](const MinimalRepairPolicy&) { return std::string("minimal-repair"); },
                        [](const YulePolicy&) { return std::string("yule"); },
                        [](const AgeReplacementPolicy&) { return std::string("age"); },
                    },
                    kind);
}

std::string ProcessSpec::id() const {
  return std::visit(
      Overloaded{
          [](const RelevationPolicy& p) { return "relevation " + p.seq.describe(); },
          [](const RenewalPolicy& p) { return "renewal " + p.seq.describe(); },
          [](const MinimalRepairPolicy& p) { return "minimal-repair " + p.law.describe(); },
          [](const YulePolicy& p) {
            char buf[48];
            std::snprintf(buf, sizeof buf, " offset=%g", p.offset);
            return "yule " + p.base.describe() + buf;
          },
          [](const AgeReplacementPolicy& p) {
            char buf[48];
            std::snprintf(buf, sizeof buf, " K=%g", p.interval);
            return "age " + p.law.describe() + buf;
          },
      },
      kind);
}

ArrivalPath simulate_path(const ProcessSpec& spec, std::size_t n_arrivals,
                          std::span<const double> uniforms) {
  if (n_arrivals == 0) throw DomainError("n_arrivals must be >= 1");
  ArrivalPath path;
  if (const auto* age = std::get_if<AgeReplacementPolicy>(&spec.kind)) {
    std::size_t cursor = 0;
    const UniformSource source = [&]() {
      if (cursor >= uniforms.size()) {
        throw TruncationError("age replacement path ran out of uniforms");
      }
      return uniforms[cursor++];
    };
    path = simulate_age_replacement_count(age->law, age->interval, n_arrivals, source);
  } else {
    if (uniforms.size() < n_arrivals) {
      throw DomainError("need one uniform per arrival: got " + std::to_string(uniforms.size()) +
                        " for " + std::to_string(n_arrivals) + " arrivals");
    }
    const ArrivalModel model = *arrival_model(spec);
    double t = 0.0;
    for (std::size_t i = 1; i <= n_arrivals; ++i) {
      t = model.step(i, t, uniforms[i - 1]);
      path.times.push_back(t);
    }
  }
  path.spec_id = spec.id();
  return path;
}

ArrivalPath simulate_age_replacement_failures(const LifetimeDistribution& law, double interval,
                                              double horizon, const UniformSource& uniforms) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be > 0");
  ArrivalPath path = run_age_replacement(law, interval, uniforms,
                                         [horizon](double event, std::size_t) {
                                           return event > horizon;
                                         });
  path.horizon = horizon;
  return path;
}

ArrivalPath simulate_age_replacement_count(const LifetimeDistribution& law, double interval,
                                           std::size_t n_failures, const UniformSource& uniforms) {
  if (n_failures == 0) throw DomainError("n_failures must be >= 1");
  return run_age_replacement(law, interval, uniforms,
                             [n_failures](double, std::size_t recorded) {
                               return recorded >= n_failures;
                             });
}

std::pair<ArrivalPath, ArrivalPath> simulate_coupled_paths(const DistributionSequence& replacement,
                                                           const DistributionSequence& epb,
                                                           std::size_t n_arrivals,
                                                           std::span<const double> uniforms) {
  const ProcessSpec renewal{RenewalPolicy{replacement}};
  const ProcessSpec relevation{RelevationPolicy{epb}};
  return {simulate_path(renewal, n_arrivals, uniforms),
          simulate_path(relevation, n_arrivals, uniforms)};
}

ArrivalPath simulate_replication(const SimulationRequest& request, std::uint64_t rep) {
  validate_request(request);
  return replicate(request, request.spec.id(), rep);
}

std::vector<ArrivalPath> simulate_serial(const SimulationRequest& request) {
  validate_request(request);
  const std::string id = request.spec.id();
  std::vector<ArrivalPath> out;
  out.reserve(request.replications);
  for (std::size_t rep = 0; rep < request.replications; ++rep) {
    out.push_back(replicate(request, id, rep));
  }
  return out;
}

std::vector<ArrivalPath> simulate_parallel(const SimulationRequest& request, int threads) {
  validate_request(request);
  const std::string id = request.spec.id();
  std::vector<ArrivalPath> out(request.replications);
  parallel_for(request.replications, threads,
               [&](std::size_t rep) { out[rep] = replicate(request, id, rep); });
  return out;
}

namespace {

void coupled_replicate(const DistributionSequence& replacement, const DistributionSequence& epb,
                       std::size_t arrivals, std::uint64_t seed, std::uint64_t rep,
                       const std::string& id_replacement, const std::string& id_epb,
                       ArrivalPath& out_replacement, ArrivalPath& out_epb) {
  const UniformStream stream(seed, rep);
  const ArrivalModel renewal{replacement, false};
  const ArrivalModel relevation{epb, true};
  out_replacement.times.resize(arrivals);
  out_epb.times.resize(arrivals);
  double t_renewal = 0.0;
  double t_epb = 0.0;
  for (std::size_t i = 1; i <= arrivals; ++i) {
    const double u = stream.at(static_cast<std::uint32_t>(i - 1));
    t_renewal = renewal.step(i, t_renewal, u);
    t_epb = relevation.step(i, t_epb, u);
    out_replacement.times[i - 1] = t_renewal;
    out_epb.times[i - 1] = t_epb;
  }
  for (ArrivalPath* p : {&out_replacement, &out_epb}) {
    p->replication = rep;
    p->seed = seed;
  }
  out_replacement.spec_id = id_replacement;
  out_epb.spec_id = id_epb;
}

void validate_coupled(std::size_t arrivals, std::size_t replications) {
  if (arrivals == 0) throw DomainError("n_arrivals must be >= 1");
  if (replications == 0) throw DomainError("replications must be >= 1");
}

}  // namespace

CoupledPaths simulate_coupled_serial(const DistributionSequence& replacement,
                                     const DistributionSequence& epb, std::size_t arrivals,
                                     std::size_t replications, std::uint64_t seed) {
  validate_coupled(arrivals, replications);
  const std::string id_r = coupled_id(replacement, "renewal");
  const std::string id_e = coupled_id(epb, "relevation");
  CoupledPaths out;
  out.replacement.resize(replications);
  out.epb.resize(replications);
  for (std::size_t rep = 0; rep < replications; ++rep) {
    coupled_replicate(replacement, epb, arrivals, seed, rep, id_r, id_e, out.replacement[rep],
                      out.epb[rep]);
  }
  return out;
}

CoupledPaths simulate_coupled_parallel(const DistributionSequence& replacement,
                                       const DistributionSequence& epb, std::size_t arrivals,
                                       std::size_t replications, std::uint64_t seed,
                                       int threads) {
  validate_coupled(arrivals, replications);
  const std::string id_r = coupled_id(replacement, "renewal");
  const std::string id_e = coupled_id(epb, "relevation");
  CoupledPaths out;
  out.replacement.resize(replications);
  out.epb.resize(replications);
  parallel_for(replications, threads, [&](std::size_t rep) {
    coupled_replicate(replacement, epb, arrivals, seed, rep, id_r, id_e, out.replacement[rep],
                      out.epb[rep]);
  });
  return out;
}

DominanceReport check_dominance(const CoupledPaths& paths, Dominance direction,
                                double relative_slack) {
  if (paths.replacement.size() != paths.epb.size()) {
    throw DomainError("coupled path sets differ in size");
  }
  DominanceReport report;
  report.paths = paths.epb.size();
  for (std::size_t p = 0; p < paths.epb.size(); ++p) {
    const auto& epb = paths.epb[p].times;
    const auto& ren = paths.replacement[p].times;
    if (epb.size() != ren.size()) throw DomainError("coupled paths differ in length");
    bool violated = false;
    for (std::size_t i = 0; i < epb.size(); ++i) {
      const double excess = direction == Dominance::EpbBelow ? epb[i] - ren[i] : ren[i] - epb[i];
      const double slack = relative_slack * std::max(std::abs(epb[i]), std::abs(ren[i]));
      if (excess > slack) {
        violated = true;
        if (excess > report.worst_excess) {
          report.worst_excess = excess;
          report.worst_replication = paths.epb[p].replication;
        }
      }
    }
    if (violated) ++report.violating_paths;
  }
  return report;
}

std::vector<std::size_t> count_at(std::span<const ArrivalPath> paths, double t, bool saturate) {
  if (!(t >= 0.0)) throw DomainError("count time must be >= 0");
  std::vector<std::size_t> counts;
  counts.reserve(paths.size());
  for (const ArrivalPath& path : paths) {
    if (path.horizon && t > *path.horizon && !saturate) {
      throw TruncationError("count at t beyond the simulated horizon");
    }
    const auto c = static_cast<std::size_t>(
        std::upper_bound(path.times.begin(), path.times.end(), t) - path.times.begin());
    if (!path.horizon && c == path.times.size() && !saturate) {
      throw TruncationError("path " + std::to_string(path.replication) + " has only " +
                            std::to_string(c) + " simulated arrivals, all <= t");
    }
    counts.push_back(c);
  }
  return counts;
}

SurvivalCurve empirical_survival(std::span<const ArrivalPath> paths, std::size_t n,
                                 const std::vector<double>& grid, double delta) {
  if (paths.empty()) throw DomainError("no paths to estimate from");
  if (n == 0) throw DomainError("arrival index must be >= 1");
  if (grid.empty()) throw DomainError("grid is empty");

  // Paths lacking arrival n count as survivors only when their horizon covers
  // the whole grid.
  std::vector<double> nth;
  nth.reserve(paths.size());
  for (const ArrivalPath& path : paths) {
    if (path.times.size() >= n) {
      nth.push_back(path.times[n - 1]);
    } else if (path.horizon && *path.horizon >= grid.back()) {
      nth.push_back(std::numeric_limits<double>::infinity());
    } else {
      throw TruncationError("arrival " + std::to_string(n) + " exceeds the " +
                            std::to_string(path.times.size()) + " simulated arrivals of path " +
                            std::to_string(path.replication));
    }
  }
  std::sort(nth.begin(), nth.end());

  SurvivalCurve curve;
  curve.grid = grid;
  curve.values.reserve(grid.size());
  const double m = static_cast<double>(nth.size());
  for (double t : grid) {
    const auto survivors = nth.end() - std::upper_bound(nth.begin(), nth.end(), t);
    curve.values.push_back(static_cast<double>(survivors) / m);
  }
  curve.kind = EmpiricalCurve{nth.size(), 1.0 - delta, dkw_half_width(nth.size(), delta)};
  curve.label = paths.front().spec_id + " n=" + std::to_string(n);
  return curve;
}

std::vector<SurvivalCurve> empirical_curve_set(std::span<const ArrivalPath> paths,
                                               std::size_t n_max, const std::vector<double>& grid,
                                               double delta) {
  std::vector<SurvivalCurve> out;
  for (std::size_t n = 1; n <= n_max; ++n) out.push_back(empirical_survival(paths, n, grid, delta));
  return out;
}

std::size_t duality_violations(std::span<const ArrivalPath> paths,
                               const std::vector<double>& grid) {
  std::size_t violations = 0;
  for (double t : grid) {
    const std::vector<std::size_t> counts = count_at(paths, t, /*saturate=*/true);
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const auto& times = paths[p].times;
      for (std::size_t n = 1; n <= times.size(); ++n) {
        const bool fewer = counts[p] < n;
        const bool later = times[n - 1] > t;
        if (fewer != later) ++violations;
      }
    }
  }
  return violations;
}

}  // namespace relev
