#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "relev/ageing.hpp"
#include "relev/orders.hpp"
#include "relev/processes.hpp"
#include "relev/relevation.hpp"

using namespace relev;

namespace {

// Laws with a monotone hazard in a known direction: shape > 1 ages, < 1 improves.
LifetimeDistribution monotone_law(oracle::Gen& gen, bool ageing) {
  const double shape = ageing ? gen.uniform(1.2, 4) : gen.uniform(0.3, 0.85);
  const double scale = gen.log_uniform(0.5, 2);
  return gen.integer(0, 1) ? LifetimeDistribution::gamma(shape, scale) : LifetimeDistribution::weibull(shape, scale);
}

double sup_distance(const SurvivalCurve& a, const SurvivalCurve& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("simulated EPB arrivals match the marginal recursion") {
    oracle::Gen gen(61);
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<LifetimeDistribution> entries;
      for (int k = 0; k < 3; ++k) entries.push_back(gen.law());
      const DistributionSequence seq(entries, Extension::Cycle);
      CAPTURE(seq.describe());
      const SimulationRequest req{ProcessSpec{RelevationPolicy{seq}}, 3, std::nullopt, 20000, 100 + std::uint64_t(trial)};
      const auto paths = simulate_parallel(req);
      double hi = 0;
      for (const auto& p : paths) hi = std::max(hi, p.times[2]);
      double upper = hi;
      for (const auto& e : entries) upper = std::min(upper, e.inverse_cumulative_hazard(200));
      const auto grid = linear_grid(upper, 50);
      const auto curves = empirical_curve_set(paths, 3, grid, 0.01 / 3);
      for (std::size_t n = 1; n <= 3; ++n) {
        CHECK(sup_distance(curves[n - 1], epb_marginal(seq, n, grid)) < curves[n - 1].band());
      }
    }
  }

  TEST_CASE("simulated renewal pairs match the convolution") {
    oracle::Gen gen(62);
    for (int trial = 0; trial < 6; ++trial) {
      const auto a = gen.law(), b = gen.law();
      const DistributionSequence seq({a, b}, Extension::Finite);
      CAPTURE(seq.describe());
      const SimulationRequest req{ProcessSpec{RenewalPolicy{seq}}, 2, std::nullopt, 20000, 200 + std::uint64_t(trial)};
      const auto paths = simulate_parallel(req);
      const auto grid = linear_grid(a.quantile(0.99) + b.quantile(0.99), 40);
      const auto emp = empirical_survival(paths, 2, grid, 0.01);
      SurvivalCurve exact{grid, {}, ExactCurve{1e-8}, "conv"};
      for (double t : grid) exact.values.push_back(convolution_survival(a, b, t));
      CHECK(sup_distance(emp, exact) < emp.band());
    }
  }

  TEST_CASE("ageing class predicts the dynamic hazard verdict") {
    oracle::Gen gen(63);
    for (int trial = 0; trial < 10; ++trial) {
      const bool ageing = trial % 2 == 0;
      const auto d = monotone_law(gen, ageing);
      CAPTURE(d.describe());
      const auto report = classify(d);
      REQUIRE(report.ifr == (ageing ? TriState::Yes : TriState::No));
      REQUIRE(report.dfr == (ageing ? TriState::No : TriState::Yes));
      const auto pairs = history_pair_sampler(trial, 2000, d.quantile(gen.uniform(0.2, 0.8)), 4);
      const auto v = dyn_hr_compare(DistributionSequence::iid(d), DistributionSequence::iid(d), pairs);
      CHECK(v.relation == (ageing ? Relation::ALessB : Relation::BLessA));
    }
  }

  TEST_CASE("NBU laws give pathwise coupling dominance, NWU laws the reverse") {
    oracle::Gen gen(64);
    for (int trial = 0; trial < 8; ++trial) {
      const bool ageing = trial % 2 == 0;
      const auto d = monotone_law(gen, ageing);
      CAPTURE(d.describe());
      const auto report = classify(d);
      REQUIRE(report.nbu == (ageing ? TriState::Yes : TriState::No));
      const auto seq = DistributionSequence::iid(d);
      const auto paths = simulate_coupled_parallel(seq, seq, 5, 5000, 300 + std::uint64_t(trial));
      CHECK(check_dominance(paths, ageing ? Dominance::EpbBelow : Dominance::EpbAbove).violating_paths == 0);
      CHECK(check_dominance(paths, ageing ? Dominance::EpbAbove : Dominance::EpbBelow).violating_paths > 0);
    }
  }

  TEST_CASE("minimal repair paths match the closed form") {
    oracle::Gen gen(65);
    for (int trial = 0; trial < 5; ++trial) {
      const auto d = gen.law();
      CAPTURE(d.describe());
      const SimulationRequest req{ProcessSpec{MinimalRepairPolicy{d}}, 4, std::nullopt, 20000, 400 + std::uint64_t(trial)};
      const auto paths = simulate_parallel(req);
      const auto grid = linear_grid(d.quantile(0.999), 40);
      const auto emp = empirical_survival(paths, 4, grid, 0.01);
      double worst = 0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        worst = std::max(worst, std::abs(emp.values[i] - oracle::minimal_repair(d.cumulative_hazard(grid[i]), 4)));
      }
      CHECK(worst < emp.band());
    }
  }

  TEST_CASE("counting duality holds for every process") {
    oracle::Gen gen(66);
    for (int trial = 0; trial < 5; ++trial) {
      const auto d = gen.law();
      const double horizon = d.quantile(0.8);  // Yule counts grow like exp(H)
      for (const ProcessSpec& spec :
           {ProcessSpec{RelevationPolicy{DistributionSequence({d, gen.law()}, Extension::Cycle)}},
            ProcessSpec{RenewalPolicy{DistributionSequence::iid(d)}}, ProcessSpec{YulePolicy{d, gen.uniform(0, 2)}},
            ProcessSpec{AgeReplacementPolicy{d, d.quantile(0.5)}}}) {
        const auto paths = simulate_parallel({spec, 1, horizon, 500, 500 + std::uint64_t(trial)});
        CHECK(duality_violations(paths, linear_grid(horizon, 30)) == 0);
      }
    }
  }
}
