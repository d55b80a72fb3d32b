#include <doctest.h>

#include "relev/errors.hpp"
#include "relev/sequence.hpp"

using relev::DistributionSequence;
using relev::Extension;
using relev::LifetimeDistribution;

TEST_SUITE("sequence") {
  const auto e1 = LifetimeDistribution::exponential(1);
  const auto e2 = LifetimeDistribution::exponential(2);
  const auto g2 = LifetimeDistribution::gamma(2, 1);

  TEST_CASE("extension rules") {
    const DistributionSequence last({e1, e2}, Extension::RepeatLast);
    CHECK(last.nth(1) == e1);
    CHECK(last.nth(2) == e2);
    CHECK(last.nth(50) == e2);

    const DistributionSequence cycle({e1, e2, g2}, Extension::Cycle);
    CHECK(cycle.nth(4) == e1);
    CHECK(cycle.nth(6) == g2);

    const DistributionSequence finite({e1, e2}, Extension::Finite);
    CHECK(finite.is_finite());
    CHECK(finite.nth(2) == e2);
    CHECK_THROWS_AS(finite.nth(3), relev::TruncationError);
    CHECK_THROWS_AS(finite.nth(0), relev::DomainError);
    CHECK_THROWS_AS(DistributionSequence({}, Extension::Cycle), relev::DomainError);
  }

  TEST_CASE("yule entries scale the base hazard by k + offset") {
    const auto seq = DistributionSequence::yule(e1);
    for (std::size_t k = 1; k <= 5; ++k) CHECK(seq.nth(k).hazard(0.3) == doctest::Approx(k + 1.0));
    const auto seq0 = DistributionSequence::yule(g2, 0.0);
    CHECK(seq0.nth(3).hazard(1.0) == doctest::Approx(3 * g2.hazard(1.0)));
    CHECK_THROWS_AS(DistributionSequence::yule(e1, -1.0), relev::DomainError);
  }

  TEST_CASE("JSON configs") {
    const auto a = relev::parse_sequence_json(R"(["exp:rate=1", "gamma:shape=2", {"extend": "cycle"}])");
    CHECK(a.size() == 2);
    CHECK(a.extension() == Extension::Cycle);
    CHECK(a.nth(3) == e1);
    const auto b = relev::parse_sequence_json(R"({"entries": ["exp:rate=2"], "extend": "finite"})");
    CHECK(b.is_finite());
    CHECK(b.nth(1) == e2);
    const auto c = relev::parse_sequence_json(R"(["weibull:shape=2"])");
    CHECK(c.extension() == Extension::RepeatLast);

    CHECK_THROWS_AS(relev::parse_sequence_json("[]"), relev::ConfigError);
    CHECK_THROWS_AS(relev::parse_sequence_json("[1]"), relev::ConfigError);
    CHECK_THROWS_AS(relev::parse_sequence_json("{"), relev::ConfigError);
    CHECK_THROWS_AS(relev::parse_sequence_json(R"(["exp", {"extend": "forever"}])"), relev::ConfigError);
    CHECK_THROWS_AS(relev::parse_sequence_json(R"({"entries": ["exp"], "oops": 1})"), relev::ConfigError);
    CHECK_THROWS_AS(relev::parse_sequence_json(R"(["gamma:shape=-1"])"), relev::ConfigError);
  }
}
