#include <cmath>

#include <gtest/gtest.h>

#include "quicksearch/model.hpp"

using namespace quicksearch;

TEST(HypothesisPair, RejectsInvertedOrDegenerateParameters) {
  EXPECT_THROW(HypothesisPair::mean(0.0, 0.0), ConfigError);
  EXPECT_THROW(HypothesisPair::mean(0.0, 1.0), ConfigError);
  EXPECT_THROW(HypothesisPair::variance(1.0, 1.0), ConfigError);
  EXPECT_THROW(HypothesisPair::variance(2.0, 0.0), ConfigError);
  EXPECT_THROW(HypothesisPair::variance(1.0, 2.0), ConfigError);
  EXPECT_NO_THROW(HypothesisPair::mean(1.0, -1.0));
  EXPECT_NO_THROW(HypothesisPair::variance(4.0, 1.0));
}

TEST(SampleIncrement, ShiftsOrScalesTheDraw) {
  const auto m = HypothesisPair::mean(2.0, -1.0);
  EXPECT_DOUBLE_EQ(sample_increment(m, false, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(sample_increment(m, true, 0.5), -0.5);
  const auto v = HypothesisPair::variance(4.0, 0.25);
  EXPECT_DOUBLE_EQ(sample_increment(v, false, 1.5), 3.0);
  EXPECT_DOUBLE_EQ(sample_increment(v, true, 1.5), 0.75);
}

TEST(Accumulate, MeanSumsAndVarianceSumsSquares) {
  const auto m = HypothesisPair::mean(0.0, -1.0);
  SufficientStat s;
  accumulate(m, s, 0.3);
  accumulate(m, s, -0.1);
  EXPECT_NEAR(s.value, 0.2, 1e-15);
  EXPECT_EQ(s.count, 2);

  const auto v = HypothesisPair::variance(4.0, 1.0);
  SufficientStat q;
  accumulate(v, q, sample_increment(v, false, 1.0));
  EXPECT_DOUBLE_EQ(q.value, 4.0);
  accumulate(v, q, -0.5);
  EXPECT_GE(q.value, 0.0);
}

TEST(LogLikelihoodRatio, MatchesSumOfPerSampleTerms) {
  for (const auto& pair : {HypothesisPair::mean(1.0, -0.5), HypothesisPair::variance(3.0, 0.5)}) {
    SufficientStat s;
    double direct = 0.0;
    for (double x : {0.4, -1.3, 2.2, 0.05}) {
      accumulate(pair, s, x);
      direct += llr_increment(pair, x);
    }
    EXPECT_NEAR(log_likelihood_ratio(pair, s), direct, 1e-12);
  }
}

TEST(LogLikelihoodRatio, MatchesDensityRatio) {
  const auto norm_pdf = [](double x, double mu, double var) {
    return std::exp(-(x - mu) * (x - mu) / (2 * var)) / std::sqrt(2 * M_PI * var);
  };
  const double x = 0.7;
  EXPECT_NEAR(llr_increment(HypothesisPair::mean(1.0, -0.5), x),
              std::log(norm_pdf(x, 1.0, 1.0) / norm_pdf(x, -0.5, 1.0)), 1e-12);
  EXPECT_NEAR(llr_increment(HypothesisPair::variance(3.0, 0.5), x),
              std::log(norm_pdf(x, 0.0, 3.0) / norm_pdf(x, 0.0, 0.5)), 1e-12);
}

TEST(Posterior, ZeroEvidenceGivesPrior) {
  EXPECT_NEAR(posterior_from_llr(0.0, 0.1), 0.1, 1e-15);
  EXPECT_NEAR(posterior_from_llr(0.0, 0.73), 0.73, 1e-15);
}

TEST(Posterior, StableAtExtremeEvidence) {
  EXPECT_EQ(posterior_from_llr(-1e6, 0.01), 1.0);
  EXPECT_EQ(posterior_from_llr(1e6, 0.01), 0.0);
  const double p = posterior_from_llr(700.0, 0.5);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1e-300);
}

TEST(Posterior, RejectsDegeneratePrior) {
  EXPECT_THROW(posterior_from_llr(0.0, 0.0), DomainError);
  EXPECT_THROW(posterior_from_llr(0.0, 1.0), DomainError);
}

TEST(Posterior, DecreasesInTheStatistic) {
  for (const auto& pair : {HypothesisPair::mean(1.0, 0.0), HypothesisPair::variance(2.0, 1.0)}) {
    double prev = 2.0;
    for (double z : {0.0, 0.5, 1.0, 3.0, 8.0}) {
      const double p = posterior_rare(pair, SufficientStat{z, 3}, 0.05);
      EXPECT_LT(p, prev);
      prev = p;
    }
  }
}

TEST(KullbackLeibler, VarianceFamilyValues) {
  const auto v = HypothesisPair::variance(4.0, 1.0);
  EXPECT_NEAR(kl_rare_vs_normal(v), 0.318147180559945309, 1e-14);
  EXPECT_NEAR(kl_normal_vs_rare(v), 0.5 * (4.0 - 1.0 - std::log(4.0)), 1e-14);
  EXPECT_NEAR(kl_rare_vs_normal(HypothesisPair::mean(1.0, -1.0)), 2.0, 1e-15);
}

TEST(HoistedMaps, MatchThePlainFunctionsBitForBit) {
  for (const auto& pair : {HypothesisPair::mean(1.7, -0.3), HypothesisPair::variance(3.0, 0.4)}) {
    const SampleMap s = sample_map(pair);
    const LlrMap l = llr_map(pair);
    for (double d : {-2.5, -0.1, 0.0, 0.7, 3.3}) {
      for (bool rare : {false, true}) {
        const double x = s(rare, d);
        EXPECT_EQ(statistic_increment(pair, x), statistic_increment(pair, sample_increment(pair, rare, d)));
      }
      EXPECT_EQ(l(d), llr_increment(pair, d));
    }
  }
}
