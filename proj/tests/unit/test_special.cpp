#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cvarq/special.hpp"
#include "oracles.hpp"

using namespace cvarq;

TEST(GaussianTail, MatchesIntegratedDensity) {
  for (double x : {-3.0, -1.0, 0.0, 0.5, 1.0, 1.96, 3.0, 5.0}) {
    EXPECT_NEAR(gaussian_tail(x), oracle::q_function(x), 1e-12) << x;
  }
}

TEST(GaussianTail, FrozenValues) {
  EXPECT_NEAR(gaussian_tail(1.96), 0.024997895148220436, 1e-16);
  EXPECT_DOUBLE_EQ(gaussian_tail(0.0), 0.5);
}

TEST(GaussianTailInv, FrozenValue) {
  EXPECT_NEAR(gaussian_tail_inv(0.1), 1.2815515655446005, 1e-14);
  EXPECT_DOUBLE_EQ(gaussian_tail_inv(0.5), 0.0);
}

TEST(GaussianTailInv, RoundTripAcrossDecades) {
  for (double p = 1e-15; p < 1.0; p *= 3.7) {
    const double x = gaussian_tail_inv(p);
    EXPECT_NEAR(gaussian_tail(x) / p, 1.0, 1e-12) << p;
  }
}

TEST(GaussianTailInv, SymmetricAndDecreasing) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng);
    EXPECT_NEAR(gaussian_tail_inv(p), -gaussian_tail_inv(1.0 - p), 1e-10);
    EXPECT_GT(gaussian_tail_inv(p * 0.99), gaussian_tail_inv(p));
  }
}

TEST(GaussianTailInv, DerivativeMatchesFiniteDifference) {
  for (double p : {1e-4, 0.01, 0.3, 0.7}) {
    const double h = 1e-6 * p;
    const double fd = (gaussian_tail_inv(p + h) - gaussian_tail_inv(p - h)) / (2 * h);
    EXPECT_NEAR(gaussian_tail_inv_derivative(p) / fd, 1.0, 1e-6);
  }
}

TEST(GaussianTailInv, RejectsEndpoints) {
  EXPECT_THROW(gaussian_tail_inv(0.0), std::domain_error);
  EXPECT_THROW(gaussian_tail_inv(1.0), std::domain_error);
  EXPECT_THROW(gaussian_tail_inv(-0.1), std::domain_error);
}

TEST(LambertW, FrozenValues) {
  EXPECT_NEAR(lambert_w0(1.0), 0.56714329040978387, 1e-15);
  EXPECT_NEAR(lambert_w0(10.0), 1.7455280027406994, 1e-15);
  EXPECT_DOUBLE_EQ(lambert_w0(0.0), 0.0);
  EXPECT_NEAR(lambert_w0(-1.0 / M_E), -1.0, 1e-7);
}

TEST(LambertW, MatchesFixedPointIteration) {
  for (double x : {0.01, 0.3, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4, 1e8}) {
    EXPECT_NEAR(lambert_w0(x), oracle::lambert_w_fixed_point(x), 1e-12 * (1 + lambert_w0(x))) << x;
  }
}

TEST(LambertW, SatisfiesDefiningEquation) {
  for (double x = -0.36; x < 1e6; x = x < 0 ? x + 0.05 : x * 1.9 + 0.01) {
    const double w = lambert_w0(x);
    EXPECT_NEAR(w * std::exp(w), x, 1e-12 * (1 + std::abs(x))) << x;
  }
}

TEST(LambertW, RejectsBelowBranchPoint) {
  EXPECT_THROW(lambert_w0(-0.5), std::domain_error);
}
