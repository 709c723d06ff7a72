#include <cmath>

#include <gtest/gtest.h>

#include "quicksearch/gains.hpp"

using namespace quicksearch;

TEST(AgilityBounds, Values) {
  const auto g = agility_gain_bounds(20, 0.5, 2);
  EXPECT_NEAR(g.lower, 1 / 0.3375, 1e-13);
  EXPECT_NEAR(g.upper, 1 / 0.325, 1e-13);
  EXPECT_NEAR(g.asymptotic_k, 10.0, 1e-15);
  const auto k0 = agility_gain_bounds(20, 0.5, 0);
  EXPECT_NEAR(k0.lower, 20.0 / 21.0, 1e-15);
  EXPECT_NEAR(k0.upper, 1.0, 1e-15);
  const auto odd = agility_gain_bounds(7, 0.7, 3);
  EXPECT_NEAR(odd.lower, 1.41872719902715849, 1e-13);
  EXPECT_NEAR(odd.upper, 1.52472228272707471, 1e-13);
  EXPECT_THROW(agility_gain_bounds(0, 0.5, 1), DomainError);
}

TEST(AgilityBounds, OrderedAndApproachAsymptote) {
  for (double s0 : {1.5, 2.0, 5.0, 20.0}) {
    for (double alpha : {0.1, 0.3, 0.5, 0.7}) {
      for (int k = 0; k <= 40; ++k) {
        const auto g = agility_gain_bounds(s0, alpha, k);
        EXPECT_LE(g.lower, g.upper);
      }
      const auto far = agility_gain_bounds(s0, alpha, 200);
      EXPECT_NEAR(far.lower, far.asymptotic_k, 1e-9);
      EXPECT_NEAR(far.upper, far.asymptotic_k, 1e-9);
    }
  }
}

TEST(ScalingBounds, Values) {
  const auto g = scaling_gain_bounds(2, 0.5, 2);
  EXPECT_NEAR(g.lower, 0.5, 1e-15);
  EXPECT_NEAR(g.upper, 1.0, 1e-15);
  const auto k0 = scaling_gain_bounds(4, 0.5, 0);
  EXPECT_NEAR(k0.lower, 0.75, 1e-15);
  EXPECT_NEAR(k0.upper, 1.0, 1e-15);
  const auto odd = scaling_gain_bounds(5, 0.6, 2);
  EXPECT_NEAR(odd.lower, 1.68888888888888889, 1e-14);
  EXPECT_NEAR(odd.upper, 1.88888888888888889, 1e-14);
  EXPECT_NEAR(odd.asymptotic_k, 1.38888888888888889, 1e-14);
  const auto big = scaling_gain_bounds(1e9, 0.5, 3);
  EXPECT_NEAR(big.lower, 8.0, 1e-7);
  EXPECT_NEAR(big.upper, 8.0, 1e-7);
  EXPECT_THROW(scaling_gain_bounds(2, 0.6, 1), DomainError);
}

TEST(EqualizedBudget, Values) {
  EXPECT_EQ(equalized_budget(0.5, 0, 20), 20.0);
  EXPECT_EQ(equalized_budget(0.3, 0, 7), 7.0);
  EXPECT_NEAR(equalized_budget_continuous(0.5, 2, 20), 6.5, 1e-15);
  EXPECT_NEAR(equalized_budget(0.5, 2, 20), 6.5, 1e-8);
  EXPECT_NEAR(equalized_budget(0.7, 3, 7.4), 4.591, 1e-8);
  EXPECT_NEAR(agility_gain(0.5, 2, 20), agility_gain_bounds(20, 0.5, 2).upper, 1e-8);
  EXPECT_THROW(equalized_budget(0.5, 2, 0.5), InfeasibleSchedule);
}

TEST(EqualizedBudget, RoundTripsThroughSOfK) {
  for (double s0 : {2.0, 3.0, 5.5, 9.0, 20.0, 33.3}) {
    for (double alpha : {0.2, 0.5, 0.8}) {
      for (int k = 0; k <= 4; ++k) {
        double s;
        try {
          s = equalized_budget(alpha, k, s0);
        } catch (const InfeasibleSchedule&) {
          continue;
        }
        EXPECT_EQ(s_of_k(s, k, alpha), static_cast<std::int64_t>(std::floor(s0)));
        if (s > 1.0) {
          EXPECT_LT(s_of_k(std::nextafter(s, 0.0) * (1 - 1e-9), k, alpha),
                    static_cast<std::int64_t>(std::floor(s0)));
        }
        if (k >= 1 && optimal_k(s, 1, alpha) > 0) {
          EXPECT_LE(s, s0);
        }
      }
    }
  }
}

TEST(ThresholdGain, Values) {
  EXPECT_NEAR(threshold_gain(2, 2, 0.5), 2.0, 1e-15);
  EXPECT_NEAR(threshold_gain(10, 3, 0.5), 6.9, 1e-15);
}
