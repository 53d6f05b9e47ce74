#include <gtest/gtest.h>

#include <cmath>

#include "cvarq/sim.hpp"
#include "oracles.hpp"

using namespace cvarq;

namespace {

SimConfig bernoulli(double eps, double eps_fb, int d, std::size_t packets, std::uint64_t seed) {
  SimConfig c;
  c.channel = {10.0, 2};
  c.rate_bits = 2.0;
  c.dc = {d, 0.5};
  c.feedback = FeedbackSpec{10, 1, 10.0};
  c.forward_eps = eps;
  c.feedback_eps = eps_fb;
  c.packets = packets;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(SimpleArq, Deterministic) {
  const auto c = bernoulli(0.2, 0.05, 3, 20000, 7);
  EXPECT_EQ(simulate(c), simulate(c));
  auto other = c;
  other.seed = 8;
  EXPECT_NE(simulate(c).total_rounds, simulate(other).total_rounds);
}

TEST(SimpleArq, GeometricRoundsWithPerfectFeedback) {
  auto c = bernoulli(0.3, 0.0, 100, 100000, 3);
  c.feedback.reset();
  c.feedback_eps.reset();
  const auto r = simulate(c);
  EXPECT_EQ(r.packets_lost, 0u);
  EXPECT_NEAR(r.goodput_estimate, 2.0 * 0.7, 3 * r.goodput_stderr);
  EXPECT_NEAR(r.mean_rounds, 1 / 0.7, 3 * r.mean_rounds_stderr);
}

TEST(SimpleArq, CountsAndAccountingIdentity) {
  const auto c = bernoulli(0.4, 0.1, 4, 30000, 5);
  const auto r = simulate(c);
  EXPECT_EQ(r.packets_delivered + r.packets_lost, r.packets_offered);
  const double lhs = r.goodput_estimate * r.total_rounds * (c.n + c.f());
  const double rhs = static_cast<double>(r.packets_delivered) * c.rate_bits * c.n;
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
}

TEST(SimpleArq, MatchesTreeFrequencies) {
  for (int d = 1; d <= 4; ++d) {
    for (double eps : {0.1, 0.5}) {
      for (double efb : {0.05, 0.3}) {
        const auto r = simulate(bernoulli(eps, efb, d, 40000, 100 + d));
        const auto t = oracle::arq_tree(eps, efb, d);
        EXPECT_NEAR(r.loss_rate, t.loss, 4 * std::sqrt(t.loss * (1 - t.loss) / 40000) + 1e-12);
        EXPECT_NEAR(r.mean_rounds, t.mean_rounds, 4 * r.mean_rounds_stderr + 1e-12);
      }
    }
  }
}

TEST(SimpleArq, MatchesClosedForms) {
  const auto c = bernoulli(0.25, 0.08, 3, 100000, 9);
  const auto r = simulate(c);
  EXPECT_NEAR(r.loss_rate, packet_loss_prob(0.25, 0.08, 3), 3 * r.loss_rate_stderr);
  EXPECT_NEAR(r.mean_rounds, expected_rounds(0.25, 0.08, 3), 3 * r.mean_rounds_stderr);
  EXPECT_NEAR(r.goodput_estimate, noisy_fb_goodput(2.0, 0.25, 0.08, 10, 3, 200),
              3 * r.goodput_stderr);
}

TEST(SimpleArq, StandardErrorShrinksWithRootPackets) {
  const auto a = simulate(bernoulli(0.3, 0.05, 3, 25000, 1));
  const auto b = simulate(bernoulli(0.3, 0.05, 3, 100000, 1));
  EXPECT_NEAR(b.goodput_stderr / a.goodput_stderr, 0.5, 0.1);
}

TEST(SimpleArq, FullFadingForwardMatchesOutage) {
  SimConfig c;
  c.channel = {10.0, 2};
  c.rate_bits = 2.5;
  c.mode = ForwardMode::kFullFading;
  c.packets = 100000;
  c.dc = {1, 0.5};
  const auto r = simulate(c);
  const auto e = outage_mc(c.channel, 2.5, 200000, 77);
  EXPECT_NEAR(r.loss_rate, e.value, 3 * std::hypot(r.loss_rate_stderr, e.std_error));
}

TEST(SimpleArq, FullFadingFeedbackMatchesMrcError) {
  SimConfig c;
  c.channel = {100.0, 2};
  c.rate_bits = 1e-3;  // forward link never fails
  c.mode = ForwardMode::kFullFading;
  c.feedback = FeedbackSpec{1, 2, 1.0};
  c.dc = {1000, 0.5};
  c.packets = 200000;
  const auto r = simulate(c);
  const double efb = feedback_error_prob(*c.feedback);
  EXPECT_NEAR(r.mean_rounds, 1 / (1 - efb), 3 * r.mean_rounds_stderr);
}

TEST(SimpleArq, RejectsBadConfig) {
  auto c = bernoulli(0.1, 0.1, 2, 0, 1);
  EXPECT_THROW(simulate(c), std::invalid_argument);
  c.packets = 10;
  c.rate_bits = 0.0;
  EXPECT_THROW(simulate(c), std::invalid_argument);
}

TEST(Harq, NeverLosesAndMatchesEstimate) {
  SimConfig c;
  c.channel = {10.0, 2};
  c.rate_bits = 4.0;
  c.harq = HarqSpec{2, 4.0};
  c.packets = 100000;
  c.seed = 31;
  const auto r = simulate(c);
  EXPECT_EQ(r.packets_lost, 0u);
  const auto e = harq_goodput(c.channel, *c.harq, 100000, 32);
  EXPECT_NEAR(r.goodput_estimate, e.value, 3 * std::hypot(r.goodput_stderr, e.std_error));
}

TEST(Harq, SingleRoundMatchesSimpleArq) {
  SimConfig h;
  h.channel = {10.0, 2};
  h.rate_bits = 2.5;
  h.harq = HarqSpec{1, 2.5};
  h.packets = 100000;
  h.seed = 1;
  SimConfig s = h;
  s.harq.reset();
  s.mode = ForwardMode::kFullFading;
  s.seed = 2;
  const auto a = simulate(h);
  const auto b = simulate(s);
  EXPECT_NEAR(a.goodput_estimate, b.goodput_estimate,
              3 * std::hypot(a.goodput_stderr, b.goodput_stderr));
  EXPECT_NEAR(a.mean_rounds, b.mean_rounds, 3 * std::hypot(a.mean_rounds_stderr, b.mean_rounds_stderr));
}

TEST(Harq, LowRateUsesOneRound) {
  SimConfig c;
  c.channel = {10.0, 2};
  c.rate_bits = 0.1 * mi_stats(10.0).mu_bits;
  c.harq = HarqSpec{3, c.rate_bits};
  c.packets = 20000;
  const auto r = simulate(c);
  EXPECT_NEAR(r.mean_rounds, 1.0, 2e-3);
  EXPECT_NEAR(r.goodput_estimate, c.rate_bits, 2e-3 * c.rate_bits);
}
