#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relev/ageing.hpp"
#include "relev/errors.hpp"
#include "relev/orders.hpp"
#include "relev/relevation.hpp"

using namespace relev;

namespace {

Relation relevation_vs_renewal(const LifetimeDistribution& d) {
  const auto grid = default_grid(d, 256);
  const auto rel = epb_marginal(DistributionSequence::iid(d), 2, grid);
  SurvivalCurve ren{grid, {}, ExactCurve{1e-8}, "renewal n=2"};
  for (double t : grid) ren.values.push_back(convolution_survival(d, d, t));
  return st_compare(rel, ren).relation;
}

}  // namespace

TEST_SUITE("ageing") {
  TEST_CASE("gamma shape sweep") {
    for (double a : {0.5, 0.8, 1.0, 1.5, 2.0}) {
      const auto r = classify(LifetimeDistribution::gamma(a, 1));
      CAPTURE(a);
      if (a == 1.0) {
        CHECK(r.ifr == TriState::Boundary);
        CHECK(r.dfr == TriState::Boundary);
        CHECK(r.nbu == TriState::Boundary);
        CHECK(r.nwu == TriState::Boundary);
      } else if (a > 1.0) {
        CHECK(r.ifr == TriState::Yes);
        CHECK(r.dfr == TriState::No);
        CHECK(r.nbu == TriState::Yes);
        CHECK(r.nwu == TriState::No);
      } else {
        CHECK(r.ifr == TriState::No);
        CHECK(r.dfr == TriState::Yes);
        CHECK(r.nbu == TriState::No);
        CHECK(r.nwu == TriState::Yes);
      }
    }
  }

  TEST_CASE("exponential and weibull") {
    const auto e = classify(LifetimeDistribution::exponential(3));
    CHECK(e.nbu == TriState::Boundary);
    CHECK(e.ifr == TriState::Boundary);
    const auto w = classify(LifetimeDistribution::weibull(2, 1));
    CHECK(w.ifr == TriState::Yes);
    CHECK(w.nbu == TriState::Yes);
    const auto wd = classify(LifetimeDistribution::weibull(0.7, 2));
    CHECK(wd.dfr == TriState::Yes);
    CHECK(wd.nwu == TriState::Yes);
  }

  TEST_CASE("Stoyanov law is NBU without being IFR") {
    const auto r = classify(LifetimeDistribution::stoyanov());
    CHECK(r.nbu == TriState::Yes);
    CHECK(r.ifr == TriState::No);
    CHECK(r.dfr == TriState::No);
    // hazard 2 sin t cos t falls after pi/4, then jumps to pi/2
    CHECK(oracle::derivative(oracle::stoyanov_H, 1.2) < oracle::derivative(oracle::stoyanov_H, 0.7));
  }

  TEST_CASE("Lai-Xie law has no ageing class") {
    const auto d = LifetimeDistribution::lai_xie();
    const auto r = classify(d);
    CHECK(r.ifr == TriState::No);
    CHECK(r.dfr == TriState::No);
    CHECK(r.nbu == TriState::No);
    CHECK(r.nwu == TriState::No);
    REQUIRE(r.nbu_witnesses.size() == 2);
    for (const auto& w : r.nbu_witnesses) {
      CHECK(w.lhs == doctest::Approx(d.survival(w.s + w.t)));
      CHECK(w.rhs == doctest::Approx(d.survival(w.s) * d.survival(w.t)));
    }
    // the hazard minimum solves 0.2 x^{-0.8} + 1.1 x^{0.2} stationary in log form
    const double turn = oracle::bisect([](double x) { return oracle::derivative(oracle::laixie_h, x, 1e-6); }, 0.05, 1.0);
    CHECK(turn == doctest::Approx(0.22473963227268904).epsilon(1e-6));
    const auto mono = classify_hazard_monotonicity(d, linear_grid(3, 3000));
    REQUIRE(mono.turning_points.size() == 1);
    CHECK(std::abs(mono.turning_points[0] - turn) < 2e-3);
  }

  TEST_CASE("consistency is enforced") {
    AgeingReport bad;
    bad.ifr = TriState::Yes;
    bad.nbu = TriState::No;
    CHECK_THROWS_AS(check_consistency(bad), NumericError);
    bad = AgeingReport{};
    bad.dfr = TriState::Yes;
    bad.nwu = TriState::No;
    CHECK_THROWS_AS(check_consistency(bad), NumericError);
    bad = AgeingReport{};
    bad.nbu = TriState::Yes;  // flat hazard with a strict NBU verdict
    CHECK_THROWS_AS(check_consistency(bad), NumericError);

    oracle::Gen gen(51);
    for (int trial = 0; trial < 25; ++trial) {
      const auto d = gen.law();
      CAPTURE(d.describe());
      CHECK_NOTHROW(classify(d));
    }
  }

  TEST_CASE("classification predicts relevation against renewal") {
    for (double a : {0.5, 0.8, 1.0, 1.5, 2.0}) {
      const auto d = LifetimeDistribution::gamma(a, 1);
      const auto r = classify(d);
      const Relation v = relevation_vs_renewal(d);
      CAPTURE(a);
      if (r.nbu == TriState::Yes) CHECK(v == Relation::ALessB);
      if (r.nwu == TriState::Yes) CHECK(v == Relation::BLessA);
      if (r.nbu == TriState::Boundary) CHECK(v == Relation::Equal);
    }
    CHECK(relevation_vs_renewal(LifetimeDistribution::stoyanov()) == Relation::ALessB);
  }

  TEST_CASE("grids and JSON") {
    const auto d = LifetimeDistribution::gamma(2, 1);
    const auto g = ageing_grid(d, 64);
    CHECK(g.size() == 64);
    CHECK(g.back() == doctest::Approx(d.quantile(0.995)));
    CHECK(g.front() == doctest::Approx(d.quantile(0.995) * 1e-3));
    const auto j = to_json(classify(d));
    CHECK(j["ifr"] == "yes");
    CHECK(j["nwu"] == "no");
    CHECK(std::string(to_string(TriState::Boundary)) == "boundary");
  }
}
