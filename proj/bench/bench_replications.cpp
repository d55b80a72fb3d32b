#include <benchmark/benchmark.h>

#include <omp.h>

#include "relev/distribution.hpp"
#include "relev/processes.hpp"
#include "relev/sequence.hpp"

using namespace relev;

namespace {

SimulationRequest relevation_request(std::size_t reps) {
  const DistributionSequence seq({LifetimeDistribution::gamma(2, 1), LifetimeDistribution::weibull(0.7, 1.5)},
                                 Extension::Cycle);
  return {ProcessSpec{RelevationPolicy{seq}}, 8, std::nullopt, reps, 42};
}

SimulationRequest renewal_request(std::size_t reps) {
  return {ProcessSpec{RenewalPolicy{DistributionSequence::iid(LifetimeDistribution::lai_xie())}}, 8, std::nullopt,
          reps, 42};
}

void BM_RelevationSerial(benchmark::State& state) {
  const auto req = relevation_request(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(req));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RelevationParallel(benchmark::State& state) {
  const auto req = relevation_request(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_parallel(req, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RenewalSerial(benchmark::State& state) {
  const auto req = renewal_request(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(req));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RenewalParallel(benchmark::State& state) {
  const auto req = renewal_request(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_parallel(req, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void thread_counts(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_max_threads();
  for (int t = 1; t <= max_threads; t *= 2) b->Args({20000, t});
  if ((max_threads & (max_threads - 1)) != 0) b->Args({20000, max_threads});
}

}  // namespace

BENCHMARK(BM_RelevationSerial)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RelevationParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenewalSerial)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenewalParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
