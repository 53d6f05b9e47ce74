#include <gtest/gtest.h>

#include <cmath>

#include "cvarq/harq.hpp"

using namespace cvarq;

TEST(HarqSamples, FinalSumIsWideCodewordInformation) {
  // Same seed: M rounds of L blocks reuse the draws of one M*L-block codeword.
  const ChannelSpec spec{10.0, 2};
  const int M = 3;
  const HarqSampleSet set(spec, M, 3000, 17);
  const auto wide = codeword_mutual_information({10.0, 6}, 3000, 17);
  for (std::size_t k = 0; k < 3000; ++k) {
    EXPECT_NEAR(set.cumulative(M, k), M * wide[k], 1e-12);
  }
}

TEST(HarqSamples, OutageMatchesWideCodewordAcrossSeeds) {
  for (int L : {1, 2}) {
    for (int M : {2, 3}) {
      const ChannelSpec spec{db_to_linear(5.0), L};
      for (double r : {1.0, 2.5, 4.0}) {
        const auto h = harq_outage(spec, {M, r}, 100000, 1);
        const auto w = outage_mc({spec.snr, M * L}, r / M, 100000, 2);
        const double sd = std::hypot(h.std_error, w.std_error);
        EXPECT_NEAR(h.value, w.value, 4 * sd + 1e-12) << L << " " << M << " " << r;
      }
    }
  }
}

TEST(HarqSamples, SingleRoundIsPlainOutage) {
  const ChannelSpec spec{10.0, 3};
  const HarqSampleSet set(spec, 1, 20000, 4);
  const OutageCurve curve(spec, MonteCarlo{20000, 4});
  for (double r : {1.0, 2.0, 3.0}) {
    EXPECT_EQ(set.estimate(r).outage.value, outage_mc(spec, r, 20000, 4).value);
    EXPECT_NEAR(set.smoothed_outage(r), curve.outage(r), 1e-12);
    EXPECT_EQ(set.estimate(r).expected_rounds.value, 1.0);
  }
}

TEST(HarqSamples, ExpectedRoundsTailSum) {
  const HarqSampleSet set({db_to_linear(5.0), 2}, 4, 20000, 3);
  for (double r : {1.0, 3.0, 6.0}) {
    double tail = 1.0;
    for (int m = 1; m < 4; ++m) {
      int count = 0;
      for (std::size_t k = 0; k < set.samples(); ++k) count += set.cumulative(m, k) <= r;
      tail += static_cast<double>(count) / set.samples();
    }
    EXPECT_NEAR(set.estimate(r).expected_rounds.value, tail, 1e-12);
  }
}

TEST(HarqSamples, SmoothedAgreesWithIndicators) {
  const HarqSampleSet set({10.0, 2}, 2, 50000, 8);
  for (double r : {2.0, 4.0, 6.0}) {
    const auto e = set.estimate(r);
    // The floor covers points where every indicator agrees and the error is 0.
    EXPECT_NEAR(set.smoothed_outage(r), e.outage.value, 4 * e.outage.std_error + 1e-4);
    EXPECT_NEAR(set.smoothed_expected_rounds(r), e.expected_rounds.value,
                4 * e.expected_rounds.std_error + 1e-4);
  }
}

TEST(HarqGoodput, StableAcrossSeeds) {
  const ChannelSpec spec{10.0, 2};
  const HarqSpec hs{2, 4.0};
  std::vector<Estimate> est;
  double mean = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    est.push_back(harq_goodput(spec, hs, 20000, s));
    mean += est.back().value / 10.0;
  }
  for (const auto& e : est) EXPECT_NEAR(e.value, mean, 3 * e.std_error);
}

TEST(HarqGoodput, LowRateLimit) {
  const ChannelSpec spec{10.0, 2};
  const double r = 0.1 * mi_stats(10.0).mu_bits;
  EXPECT_NEAR(harq_expected_rounds(spec, {3, r}, 20000, 1).value, 1.0, 5e-3);
  EXPECT_NEAR(harq_goodput(spec, {3, r}, 20000, 1).value, r, 5e-3 * r);
}

TEST(HarqGoodput, FirstRoundOutageUsesBackend) {
  const ChannelSpec spec{10.0, 2};
  EXPECT_NEAR(harq_first_round_outage(spec, {2, 2.0}, GaussianFading{}), outage_gaussian(spec, 2.0),
              1e-15);
}

TEST(HarqOptimize, SingleRoundMatchesPlainOptimum) {
  const ChannelSpec spec{10.0, 2};
  const auto h = optimize_initial_rate(spec, 1, 50000, 5);
  const auto p = optimize_eps(spec, MonteCarlo{50000, 5});
  EXPECT_NEAR(h.r_init_star, p.rate_star, 2 * kHarqRateTolerance);
  EXPECT_NEAR(h.goodput_star, p.goodput_star, 1e-3);
}

TEST(HarqOptimize, BoundAndDominance) {
  const ChannelSpec spec{10.0, 2};
  const auto h = optimize_initial_rate(spec, 2, 50000, 5);
  EXPECT_TRUE(h.bound_holds);
  EXPECT_LE(h.r_init_star / 2, h.bound_rate + 2 * kHarqRateTolerance);
  const auto p = optimize_eps(spec, MonteCarlo{50000, 5});
  EXPECT_GT(h.goodput_star, p.goodput_star);
  EXPECT_GT(h.r_init_star, p.rate_star);
}

TEST(HarqSpec, Validation) {
  EXPECT_THROW((HarqSpec{0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((HarqSpec{2, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW(HarqSampleSet({10.0, 1}, 2, 0, 1), std::invalid_argument);
}
