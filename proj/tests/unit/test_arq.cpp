#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cvarq/arq.hpp"
#include "oracles.hpp"

using namespace cvarq;

namespace {

// Average BPSK error over L_fb Rayleigh branches with MRC, integrating the
// conditional error against the Gamma(L_fb) density of the summed gains.
double feedback_error_oracle(double f, int l_fb, double snr) {
  const double gamma = f / l_fb * snr;
  const double log_fact = std::lgamma(static_cast<double>(l_fb));
  auto integrand = [&](double s) {
    const double t = std::exp(s);
    const double q = 0.5 * std::erfc(std::sqrt(gamma * t));
    return q * std::exp(l_fb * s - t - log_fact);
  };
  return oracle::simpson(integrand, -60.0, std::log(80.0), 200000);
}

}  // namespace

TEST(Crc, MinimumBits) {
  EXPECT_EQ(min_crc_bits(1e-7, 1e-6), 0);
  EXPECT_EQ(min_crc_bits(1e-6, 1e-6), 0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-12, -0.01);
  for (int i = 0; i < 2000; ++i) {
    const double eps = std::pow(10.0, u(rng));
    const double p = std::pow(10.0, u(rng) - 3);
    const int k = min_crc_bits(eps, p);
    EXPECT_LE(eps * std::ldexp(1.0, -k), p);
    if (k > 0) {
      EXPECT_GT(eps * std::ldexp(1.0, -(k - 1)), p);
    }
  }
}

TEST(Crc, JointOptimumMatchesBruteForce) {
  const ChannelSpec spec{10.0, 2};
  const OutageCurve curve(spec, GaussianFading{});
  const int n = 200;
  const double p = 1e-6;
  double best = -1.0;
  for (int k = 0; k <= 40; ++k) {
    const double hi = std::min(p * std::ldexp(1.0, k), 1 - 1e-6);
    if (hi < 1e-6) continue;
    auto g = [&](double le) {
      const double eps = std::exp(le);
      return (curve.rate(eps) - double(k) / n) * (1 - eps);
    };
    best = std::max(best, oracle::grid_max(g, std::log(1e-6), std::log(hi), 3000).second);
  }
  const auto d = crc_joint_optimize(curve, n, p);
  EXPECT_GE(d.effective_goodput, best - 1e-7);
  EXPECT_LE(d.effective_goodput, best + 1e-4);
  EXPECT_LE(d.eps_star * std::ldexp(1.0, -d.k_star), p * (1 + 1e-12));
  EXPECT_NEAR(d.effective_goodput, crc_goodput(curve, d.eps_star, d.k_star, n), 1e-12);
}

TEST(Crc, Infeasible) {
  EXPECT_THROW(crc_joint_optimize({10.0, 2}, 200, 1e-300, GaussianFading{}), InfeasibleError);
}

TEST(Delay, CapIsRootOfLossTarget) {
  EXPECT_NEAR((DelayConstraint{3, 1e-6}.eps_cap()), 0.01, 1e-15);
  const ChannelSpec spec{10.0, 2};
  const auto free = optimize_eps(spec, GaussianFading{});
  const auto tight = delay_constrained_optimize(spec, {3, 1e-6}, GaussianFading{});
  EXPECT_LE(tight.eps_star, (DelayConstraint{3, 1e-6}.eps_cap()));
  EXPECT_NEAR(tight.eps_star, 0.01, 1e-12);
  const auto loose = delay_constrained_optimize(spec, {1, 0.9}, GaussianFading{});
  EXPECT_NEAR(loose.eps_star, free.eps_star, 1e-12);
}

TEST(Delay, Validation) {
  EXPECT_THROW((DelayConstraint{0, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((DelayConstraint{2, 0.0}.validate()), std::invalid_argument);
}

TEST(Feedback, ErrorMatchesQuadrature) {
  for (int l_fb : {1, 2, 3, 5}) {
    for (double f : {1.0, 4.0, 30.0}) {
      for (double db : {0.0, 5.0, 15.0}) {
        const double snr = db_to_linear(db);
        const double want = feedback_error_oracle(f, l_fb, snr);
        EXPECT_NEAR(feedback_error_prob(f, l_fb, snr), want, 1e-9 * want + 1e-15)
            << l_fb << " " << f << " " << db;
      }
    }
  }
}

TEST(Feedback, ClosedFormSumTerms) {
  // Direct evaluation of the combinatorial form for a moderate case.
  const double f = 7, snr = 2.0;
  const int l = 3;
  const double g = f / l * snr;
  const double nu = std::sqrt(g / (1 + g));
  double s = 0;
  for (int j = 0; j < l; ++j) s += oracle::choose(l - 1 + j, j) * std::pow((1 + nu) / 2, j);
  EXPECT_NEAR(feedback_error_prob(f, l, snr), std::pow((1 - nu) / 2, l) * s, 1e-15);
}

TEST(Feedback, MinimumSymbols) {
  const double snr = db_to_linear(5.0);
  EXPECT_EQ(min_feedback_symbols(snr, 1, 1e-3), 79);
  EXPECT_EQ(min_feedback_symbols(snr, 2, 1e-3), 9);
  for (int l : {1, 2, 4}) {
    for (double t : {1e-2, 1e-4, 1e-6}) {
      const int f = min_feedback_symbols(snr, l, t);
      EXPECT_LE(feedback_error_prob(f, l, snr), t);
      if (f > 1) {
        EXPECT_GT(feedback_error_prob(f - 1, l, snr), t);
      }
    }
  }
}

TEST(Feedback, DecreasesInSymbolsAndDiversity) {
  for (int f = 1; f < 50; ++f) {
    EXPECT_LT(feedback_error_prob(f + 1, 2, 3.0), feedback_error_prob(f, 2, 3.0));
    EXPECT_LT(feedback_error_prob(f, 3, 3.0), feedback_error_prob(f, 2, 3.0));
  }
}

TEST(Loss, DualFormsAgree) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 10000; ++i) {
    const double eps = u(rng);
    const double efb = u(rng);
    const int d = 1 + static_cast<int>(u(rng) * 20);
    EXPECT_NEAR(packet_loss_by_failures(eps, efb, d), packet_loss_by_successes(eps, efb, d), 1e-12);
  }
}

TEST(Loss, MatchesTreeEnumeration) {
  for (int d = 1; d <= 6; ++d) {
    for (double eps : {0.0, 0.05, 0.3, 0.7, 1.0}) {
      for (double efb : {0.0, 0.01, 0.2, 0.5, 1.0}) {
        const auto t = oracle::arq_tree(eps, efb, d);
        EXPECT_NEAR(t.total, 1.0, 1e-12);
        EXPECT_NEAR(packet_loss_prob(eps, efb, d), t.loss, 1e-12) << eps << " " << efb << " " << d;
        EXPECT_NEAR(expected_rounds(eps, efb, d), t.mean_rounds, 1e-12) << eps << " " << efb << " " << d;
      }
    }
  }
}

TEST(Loss, PerfectFeedbackLimits) {
  for (int d = 1; d < 8; ++d) {
    EXPECT_NEAR(packet_loss_prob(0.2, 0.0, d), std::pow(0.2, d), 1e-15);
    EXPECT_NEAR(expected_rounds(0.2, 0.0, d), (1 - std::pow(0.2, d)) / 0.8, 1e-12);
    double geo = 0;
    for (int t = 0; t < d; ++t) geo += std::pow(0.1, t);
    EXPECT_NEAR(expected_rounds(0.0, 0.1, d), geo, 1e-12);
  }
}

TEST(Loss, ArgumentChecks) {
  EXPECT_THROW(packet_loss_prob(1.5, 0.1, 2), std::domain_error);
  EXPECT_THROW(expected_rounds(0.1, 0.1, 0), std::invalid_argument);
}

TEST(Loss, BoundaryFeedbackError) {
  const DelayConstraint dc{3, 1e-6};
  for (double eps : {1e-4, 1e-3, 5e-3}) {
    const double e = max_feedback_error_for_loss(eps, dc);
    ASSERT_GT(e, 0.0);
    EXPECT_LE(packet_loss_by_successes(eps, e, dc.d), dc.q);
    EXPECT_GT(packet_loss_by_successes(eps, e * (1 + 1e-9), dc.d), dc.q);
  }
  EXPECT_LT(max_feedback_error_for_loss(0.5, dc), 0.0);
}

TEST(Loss, SimplifiedConstraints) {
  const DelayConstraint dc{3, 1e-6};
  EXPECT_TRUE(simplified_constraints_hold(1e-3, 1e-3, dc));
  EXPECT_FALSE(simplified_constraints_hold(1e-3, 1e-2, dc));
  EXPECT_FALSE(simplified_constraints_hold(0.02, 1e-6, dc));
}

TEST(NoisyGoodput, ComposesPieces) {
  const double v = noisy_fb_goodput(2.0, 0.05, 0.01, 10, 3, 200);
  const double want =
      200.0 / 210.0 * 2.0 * (1 - packet_loss_prob(0.05, 0.01, 3)) / expected_rounds(0.05, 0.01, 3);
  EXPECT_NEAR(v, want, 1e-15);
  EXPECT_NEAR(noisy_fb_goodput(2.0, 0.1, 0.0, 0, 1000, 200), 2.0 * 0.9, 1e-12);
}

TEST(JointDesign, MatchesExhaustiveSearch) {
  const ChannelSpec spec{db_to_linear(5.0), 3};
  const OutageCurve curve(spec, GaussianFading{});
  const DelayConstraint dc{3, 1e-6};
  const int n = 200;
  const int l_fb = 2;
  const int f_cap = min_feedback_symbols(spec.snr, l_fb, dc.q);
  double best = -1;
  for (int i = 0; i < 800; ++i) {
    const double eps = 1e-6 * std::pow(dc.eps_cap() / 1e-6, i / 799.0);
    const double rate = curve.rate(eps);
    for (int f = 1; f <= f_cap; ++f) {
      const double efb = feedback_error_prob(f, l_fb, spec.snr);
      if (packet_loss_prob(eps, efb, dc.d) > dc.q) continue;
      best = std::max(best, noisy_fb_goodput(rate, eps, efb, f, dc.d, n));
    }
  }
  const auto d = joint_optimize_noisy_fb(curve, l_fb, dc, n);
  EXPECT_LE(d.xi_d, dc.q);
  EXPECT_NEAR(d.goodput, noisy_fb_goodput(d.rate_bits, d.eps, d.eps_fb, d.f, dc.d, n), 1e-14);
  // The grid oracle can only undershoot the continuous optimum.
  EXPECT_GE(d.goodput, best * (1 - 1e-9));
  EXPECT_LE(d.goodput, best * (1 + 2e-3));
}

TEST(JointDesign, Infeasible) {
  EXPECT_THROW(joint_optimize_noisy_fb({10.0, 2}, 1, {1, 1e-8}, 200, GaussianFading{}),
               InfeasibleError);
}

TEST(JointDesign, BestFeedbackForFixedEpsPrefersSmallerF) {
  const FeedbackTable table(db_to_linear(5.0), 2, 1e-6);
  const auto d = best_feedback_design(5e-3, 1.0, table, {3, 1e-6}, 200);
  ASSERT_TRUE(d.has_value());
  for (int f = 1; f < d->f; ++f) {
    const double efb = table.eps_fb(f);
    if (packet_loss_prob(5e-3, efb, 3) > 1e-6) continue;
    EXPECT_LT(noisy_fb_goodput(1.0, 5e-3, efb, f, 3, 200), d->goodput);
  }
}
