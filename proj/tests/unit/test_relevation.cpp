#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relev/curve.hpp"
#include "relev/errors.hpp"
#include "relev/processes.hpp"
#include "relev/relevation.hpp"

using namespace relev;

namespace {

const auto kExp1 = LifetimeDistribution::exponential(1);
const auto kExp2 = LifetimeDistribution::exponential(2);
const auto kGamma2 = LifetimeDistribution::gamma(2, 1);
const auto kGammaHalf = LifetimeDistribution::gamma(0.5, 1);
const auto kWeibull2 = LifetimeDistribution::weibull(2, 1);
const auto kStoyanov = LifetimeDistribution::stoyanov();
const auto kLaiXie = LifetimeDistribution::lai_xie();

}  // namespace

TEST_SUITE("relevation") {
  TEST_CASE("relevation transform against closed forms") {
    CHECK(relevation_transform(kGamma2, kLaiXie, 0.0) == 1.0);
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      CHECK(relevation_transform(kExp1, kExp1, t) == doctest::Approx((1 + t) * std::exp(-t)).epsilon(1e-12));
      // Fbar(t) + Gbar(t) int e^{x} dx for F = Exp(1), G = Exp(2)
      CHECK(relevation_transform(kExp1, kExp2, t) ==
            doctest::Approx(2 * std::exp(-t) - std::exp(-2 * t)).epsilon(1e-12));
    }
    CHECK(relevation_transform(kExp1, kExp1, 1.0) == doctest::Approx(0.735759).epsilon(1e-6));
    // iid relevation is minimal repair: Fbar (1 + H); mpmath reference
    CHECK(relevation_transform(kLaiXie, kLaiXie, 2.0) == doctest::Approx(0.00035752611760514138).epsilon(1e-8));
  }

  TEST_CASE("relevation transform agrees with simulated T + S_T") {
    // T ~ F, then S_T ~ {S - T | S > T}; inverse transforms by plain bisection
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto H = oracle::laixie_H;
    const int m = 100000;
    const double t = 2.0;
    int alive = 0;
    for (int i = 0; i < m; ++i) {
      const double e1 = -std::log(1 - U(rng));
      const double T = oracle::bisect([&](double x) { return H(x) - e1; }, 0, 10, 1e-10);
      const double e2 = -std::log(1 - U(rng)) + H(T);
      const double S = oracle::bisect([&](double x) { return H(x) - e2; }, 0, 10, 1e-10);
      alive += S > t;
    }
    const double band = 3 * dkw_half_width(m, 0.01);
    CHECK(std::abs(alive / double(m) - relevation_transform(kLaiXie, kLaiXie, t)) < band);
  }

  TEST_CASE("relevation transform names the singular abscissa") {
    try {
      relevation_transform(kExp1, kExp1, 700.0);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("575.6") != std::string::npos);  // -ln(1e-250)
    }
  }

  TEST_CASE("convolution survival") {
    for (double t : {0.3, 1.0, 2.5, 6.0}) {
      CHECK(convolution_survival(kGamma2, kGamma2, t) == doctest::Approx(oracle::erlang_survival(4, 1, t)).epsilon(1e-10));
      CHECK(convolution_survival(kGammaHalf, kGammaHalf, t) == doctest::Approx(std::exp(-t)).epsilon(1e-9));
      CHECK(convolution_survival(kExp1, kExp2, t) ==
            doctest::Approx(2 * std::exp(-t) - std::exp(-2 * t)).epsilon(1e-10));
    }
    // mpmath, endpoint-mapped tanh-sinh at 40 digits
    CHECK(convolution_survival(kLaiXie, kLaiXie, 0.5) == doctest::Approx(0.44762381967964008).epsilon(1e-8));
    CHECK(convolution_survival(kLaiXie, kLaiXie, 1.0) == doctest::Approx(0.17328166834569576).epsilon(1e-8));
    CHECK(std::abs(convolution_survival(kLaiXie, kLaiXie, 2.0) - 0.0085603384232750058) < 1e-11);
    CHECK(convolution_survival(kWeibull2, kWeibull2, 1.0) == doctest::Approx(0.88684186805200813).epsilon(1e-9));
  }

  TEST_CASE("epb marginal: n = 1 and closed-form examples") {
    const auto grid = log_grid(5, 64);
    const auto c1 = epb_marginal(DistributionSequence::iid(kGamma2), 1, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c1.values[i] == doctest::Approx(kGamma2.survival(grid[i])));
    CHECK(epb_marginal(DistributionSequence::iid(kExp1), 2, {0.0, 1.0}).values[1] ==
          doctest::Approx(0.735759).epsilon(1e-6));
    CHECK(epb_marginal(DistributionSequence::iid(kWeibull2), 3, {0.0, 1.0}).values[1] ==
          doctest::Approx(2.5 * std::exp(-1.0)).epsilon(1e-9));
    // mpmath: e^{-sin^2 1} sum_{k<=3} sin^{2k}(1)/k!
    CHECK(std::abs(epb_marginal(DistributionSequence::iid(kStoyanov), 4, {0.0, 1.0}).values[1] -
                   0.99401430174458185) < 1e-6);
    CHECK(epb_marginal(DistributionSequence::iid(kGammaHalf), 3, {0.0, 1.0}).values[1] ==
          doctest::Approx(0.71730416941988971).epsilon(1e-9));
    const auto c = epb_marginal(DistributionSequence::iid(kExp1), 3, grid);
    CHECK(c.is_exact());
    CHECK(c.band() == doctest::Approx(3e-7));
  }

  TEST_CASE("epb marginal equals minimal repair for iid entries, n <= 6") {
    for (const auto& d : {kExp1, kGamma2, kGammaHalf, kWeibull2, kStoyanov, kLaiXie}) {
      const auto grid = default_grid(d, 256);
      for (std::size_t n = 1; n <= 6; ++n) {
        const auto c = epb_marginal(DistributionSequence::iid(d), n, grid);
        double worst = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          worst = std::max(worst, std::abs(c.values[i] - oracle::minimal_repair(d.cumulative_hazard(grid[i]), int(n))));
        }
        CHECK_MESSAGE(worst < 1e-6, d.describe() << " n=" << n);
      }
    }
  }

  TEST_CASE("epb marginal for distinct entries against nested Simpson") {
    const DistributionSequence seq({kGamma2, kWeibull2, LifetimeDistribution::exponential(1.5)},
                                   Extension::Finite);
    const auto F1 = seq.nth(1), F2 = seq.nth(2), F3 = seq.nth(3);
    for (double t : {0.7, 1.5, 3.0}) {
      // n = 2 against the adaptive relevation transform
      CHECK(epb_marginal(seq, 2, {0.0, t}).values[1] == doctest::Approx(relevation_transform(F1, F2, t)).epsilon(1e-9));
      // n = 3: Gbar_2(t) + Fbar_3(t) int_0^t g_2(x) / Fbar_3(x) dx with g_2 = f_2 I_2
      auto I2 = [&](double x) { return oracle::simpson([&](double y) { return F1.density(y) / F2.survival(y); }, 0, x, 200); };
      const double inner = oracle::simpson([&](double x) { return F2.density(x) * I2(x) / F3.survival(x); }, 0, t, 200);
      const double ref = relevation_transform(F1, F2, t) + F3.survival(t) * inner;
      CHECK(epb_marginal(seq, 3, {0.0, t}).values[1] == doctest::Approx(ref).epsilon(1e-7));
    }
    CHECK_THROWS_AS(epb_marginal(seq, 4, {0.0, 1.0}), TruncationError);
  }

  TEST_CASE("epb marginal density is minus the curve derivative") {
    const auto seq = DistributionSequence({kGamma2, kLaiXie}, Extension::Cycle);
    const std::vector<double> ts = {0.3, 0.8, 1.4};
    const auto dens = epb_marginal_density(seq, 3, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double fd = -oracle::derivative([&](double x) { return epb_marginal(seq, 3, {0.0, x}).values[1]; }, ts[i], 1e-3);
      CHECK(dens[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  TEST_CASE("later arrivals survive longer (property)") {
    oracle::Gen gen(32);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<LifetimeDistribution> entries;
      for (int k = 0; k < 3; ++k) entries.push_back(gen.law());
      const DistributionSequence seq(entries, Extension::Cycle);
      CAPTURE(seq.describe());
      const auto grid = linear_grid(entries[0].quantile(0.99), 40);
      std::vector<double> prev(grid.size(), 0.0);
      for (std::size_t n = 1; n <= 4; ++n) {
        const auto c = epb_marginal(seq, n, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c.values[i] >= prev[i] - 1e-9);
        prev = c.values;
      }
    }
  }

  TEST_CASE("minimal repair closed form") {
    CHECK(minimal_repair_marginal(kExp1, 2, 1.0) == doctest::Approx(2 * std::exp(-1.0)));
    CHECK(minimal_repair_marginal(kGamma2, 1, 1.3) == doctest::Approx(kGamma2.survival(1.3)));
    for (int n = 1; n <= 8; ++n) {
      CHECK(minimal_repair_marginal(LifetimeDistribution::exponential(0.7), n, 3.0) ==
            doctest::Approx(oracle::poisson_below(2.1, n)));
    }
  }

  TEST_CASE("joint density") {
    const auto e = LifetimeDistribution::exponential(1.7);
    const std::vector<double> ts = {0.2, 0.5, 1.1, 2.0};
    CHECK(epb_joint_density(DistributionSequence::iid(e), ts) == doctest::Approx(std::pow(1.7, 4) * std::exp(-1.7 * 2.0)));
    CHECK(epb_joint_density(DistributionSequence::iid(kGamma2), std::vector<double>{0.7}) == doctest::Approx(kGamma2.density(0.7)));
    const std::vector<double> pair = {0.5, 1.0};
    CHECK(epb_joint_density(DistributionSequence::iid(kGamma2), pair) == doctest::Approx(std::exp(-1.0) / 3));
    // distinct entries Exp(1), Exp(2): e^{-t1} * 2 e^{-2 t2} / e^{-2 t1}
    const DistributionSequence two({kExp1, kExp2}, Extension::Finite);
    CHECK(epb_joint_density(two, pair) == doctest::Approx(2 * std::exp(0.5 - 2.0)));
    CHECK_THROWS_AS(epb_joint_density(DistributionSequence::iid(kGamma2), std::vector<double>{1.0, 0.5}), DomainError);
    CHECK_THROWS_AS(epb_joint_density(DistributionSequence::iid(kGamma2), std::vector<double>{0.0, 0.5}), DomainError);
  }

  TEST_CASE("joint density integrates to the n = 2 marginal") {
    const DistributionSequence seq({kGamma2, kWeibull2}, Extension::Finite);
    for (double t : {0.8, 2.0}) {
      const double mass = oracle::simpson(
          [&](double t2) {
            return oracle::simpson([&](double t1) {
              if (t2 <= 0) return 0.0;
              const std::vector<double> v = {std::clamp(t1, 1e-12, t2 * (1 - 1e-12)), t2};
              return epb_joint_density(seq, v);
            }, 0, t2, 200);
          },
          0, t, 200);
      CHECK(std::abs(mass - (1 - epb_marginal(seq, 2, {0.0, t}).values[1])) < 1e-4);
    }
  }

  TEST_CASE("joint density against a simulated histogram") {
    const SimulationRequest req{ProcessSpec{MinimalRepairPolicy{kGamma2}}, 2, std::nullopt, 1000000, 99};
    const auto paths = simulate_parallel(req);
    int in_box = 0;
    for (const auto& p : paths) {
      in_box += std::abs(p.times[0] - 0.5) < 0.05 && std::abs(p.times[1] - 1.0) < 0.05;
    }
    const double estimate = in_box / (1e6 * 0.01);
    CHECK(estimate == doctest::Approx(0.122626).epsilon(0.1));
  }
}
