#include <cmath>

#include <gtest/gtest.h>

#include "quicksearch/analysis.hpp"

using namespace quicksearch;

TEST(SignalExponents, Values) {
  const double ln = std::log(10000.0);
  EXPECT_NEAR(mean_signal_exponent(std::sqrt(2 * ln), 10000), 1.0, 1e-14);
  EXPECT_NEAR(mean_signal_exponent(1.073, 10000), 0.0625, 5e-5);
  EXPECT_EQ(mean_signal_exponent(0.0, 10000), 0.0);
  EXPECT_NEAR(mean_signal_exponent(MeanTest{1.5, 0.5}, 100), 1.0 / (2 * std::log(100.0)), 1e-15);
  EXPECT_NEAR(variance_signal_exponent(10000.0, 10000), 1.0, 1e-14);
  EXPECT_NEAR(variance_signal_exponent(VarianceTest{10.0, 1.0}, 10000), 0.25, 1e-14);
  EXPECT_EQ(variance_signal_exponent(1.0, 10000), 0.0);
  EXPECT_NEAR(gap_for_exponent(mean_signal_exponent(0.8, 500), 500), 0.8, 1e-14);
  EXPECT_NEAR(ratio_for_exponent(variance_signal_exponent(7.0, 500), 500), 7.0, 1e-12);
}

TEST(Thresholds, Values) {
  EXPECT_NEAR(mean_threshold(0.25, 2.0, 2, 0.5), 0.0625, 1e-15);
  EXPECT_NEAR(mean_threshold(0.25, 1.0, 0, 0.5), 0.25, 1e-15);
  EXPECT_NEAR(mean_threshold(1.0, 2.0, 2, 0.5), 0.0, 1e-15);
  EXPECT_NEAR(variance_threshold(0.5, 2.0, 2, 0.5), 0.25, 1e-15);
  EXPECT_NEAR(variance_threshold(0.0, 4.0, 0, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(variance_threshold(1.0, 4.0, 3, 0.5), 0.0, 1e-15);
  // alpha above 1 - 1/S falls back to floor(S) rounds.
  EXPECT_NEAR(mean_threshold(0.25, 2.0, 3, 0.7), 0.125, 1e-15);
  EXPECT_THROW(mean_threshold(1.5, 2.0, 2, 0.5), DomainError);
}

TEST(Thresholds, AgreeWithBuiltScheduleAtLargeN) {
  for (double s : {2.0, 3.0, 5.0, 10.0}) {
    for (int k = 0; k <= 4; ++k) {
      for (double alpha : {0.2, 0.5}) {
        SearchConfig c;
        c.n = 1000000000;
        c.epsilon = 0.01;
        c.t_target = 1;
        c.budget_s = s;
        c.max_refines = k;
        c.alpha = alpha;
        const auto tau = static_cast<double>(build_schedule(c).tau);
        const double d = 1 - std::sqrt(0.3);
        EXPECT_NEAR(mean_threshold(0.3, s, k, alpha), d * d / tau, 1e-15);
      }
    }
  }
}

TEST(RetentionScale, Values) {
  EXPECT_NEAR(refinement_retention_scale(TestFamily::mean, 10000, 0.5), 0.1, 1e-15);
  EXPECT_NEAR(refinement_retention_scale(TestFamily::variance, 10000, 0.5), 4.60517018598809136, 1e-13);
  EXPECT_EQ(refinement_retention_scale(TestFamily::mean, 10000, 0.0), 1.0);
  EXPECT_EQ(classify_retention(0.2, 0.1), RetentionClass::above);
  EXPECT_EQ(classify_retention(0.1, 0.1), RetentionClass::below);
}

TEST(RetentionScale, DetectionGapDominates) {
  for (int i = 1; i <= 9; ++i) {
    const double e = 0.1 * i;
    const double gap = gap_for_exponent(mean_threshold(e, 2.0, 2, 0.5), 10000);
    EXPECT_GT(gap, refinement_retention_scale(TestFamily::mean, 10000, e)) << e;
  }
}

TEST(BoundTerms, Values) {
  const auto sym = mean_bound_terms(500, 500, 4, 0.7);
  EXPECT_NEAR(sym.a_n, 1.0, 1e-15);
  EXPECT_NEAR(sym.b_n, std::sqrt(gaussian_h(500)) * 2 * 0.7, 1e-13);
  EXPECT_EQ(mean_bound_terms(500, 500, 4, 0.0).b_n, 0.0);
  const auto ex = mean_bound_terms(100, 10000, 4, 1.073);
  EXPECT_NEAR(ex.b_n, 2.47494511006103190, 1e-12);
  EXPECT_NEAR(ex.a_n, 2.77185150146400910 / 4.02496632750940154, 1e-14);
  EXPECT_NEAR(gap_for_b(ex.b_n, 100, 10000, 4), 1.073, 1e-13);
  EXPECT_THROW(mean_bound_terms(2, 100, 4, 1.0), DomainError);
}

TEST(LowerBound, Values) {
  EXPECT_NEAR(mean_error_lower_bound(0.0), 0.469791718049180945, 1e-15);
  EXPECT_NEAR(mean_error_lower_bound(1.0), 0.208386454079296400, 1e-15);
  EXPECT_NEAR(mean_error_lower_bound(2.0), 0.0417544649380933581, 1e-15);
  EXPECT_NEAR(mean_error_lower_bound(5.0), 1.64809451383709252e-19, 1e-32);
  EXPECT_NEAR(mean_error_lower_bound(-3.0), 0.950783644623597561, 1e-15);
  EXPECT_EQ(mean_error_lower_bound(50.0), 0.0);
  EXPECT_NEAR(mean_error_lower_bound(-40.0), 1.0, 1e-15);
}

TEST(LowerBound, ShapeOverTheLine) {
  double prev = 1.0;
  for (double b = -30.0; b <= 30.0; b += 0.25) {
    const double lb = mean_error_lower_bound(b);
    EXPECT_GE(lb, 0.0);
    EXPECT_LT(lb, 1.0);
    EXPECT_LE(lb, prev);
    if (b >= 0.0) {
      EXPECT_LT(lb, 0.63);
    }
    prev = lb;
  }
}

TEST(VarianceClosedForm, Values) {
  EXPECT_NEAR(variance_error_from_theta(1.0, 1), 0.5, 1e-15);
  EXPECT_NEAR(variance_error_from_theta(9.0, 3), 0.271, 1e-14);
  EXPECT_LT(variance_error_from_theta(1e12, 3), 1e-11);
  EXPECT_NEAR(variance_error_closed_form(4.0, 4, 50, 950, 2), 0.791020408163265306, 1e-14);
  EXPECT_NEAR(variance_theta_power(variance_ratio_for_theta(9.0, 4, 37, 1800), 4, 37, 1800), 9.0, 1e-12);
  EXPECT_NEAR(variance_error_expected(4.0, 4, 1000, 0.05, 2), 0.791020408163265306, 1e-14);
}

TEST(VarianceClosedForm, Monotonicity) {
  double prev = 1.0;
  for (double ratio = 1.5; ratio < 40; ratio *= 1.3) {
    const double e = variance_error_closed_form(ratio, 4, 30, 970, 3);
    EXPECT_LT(e, prev);
    prev = e;
  }
  for (int t = 1; t < 6; ++t)
    EXPECT_LT(variance_error_closed_form(5, 4, 30, 970, t), variance_error_closed_form(5, 4, 30, 970, t + 1));
  EXPECT_LT(variance_error_closed_form(5, 4, 30, 970, 2), variance_error_closed_form(5, 4, 30, 1970, 2));
}

TEST(Region, ShapeAndBoundary) {
  SearchConfig base;
  base.n = 10000;
  base.t_target = 1;
  base.budget_s = 2;
  base.max_refines = 2;
  base.alpha = 0.5;
  const auto grid = build_region(TestFamily::mean, base, open_unit_axis(7), open_unit_axis(5));
  EXPECT_EQ(grid.cells.size(), 35u);
  for (const auto& c : grid.cells) EXPECT_EQ(c.detectable, c.signal > c.threshold);
  EXPECT_FALSE(grid.cells.front().empirical_error.has_value());

  // A cell exactly on the threshold is undetectable.
  const double thr = mean_threshold(0.25, 2, 2, 0.5);
  const auto edge = build_region(TestFamily::mean, base, {thr}, {0.25});
  EXPECT_FALSE(edge.cells[0].detectable);

  const auto high = build_region(TestFamily::variance, base, open_unit_axis(50), {0.99});
  int det = 0;
  for (const auto& c : high.cells) det += c.detectable ? 1 : 0;
  EXPECT_GE(det, 49);
}

TEST(Region, RefinementEnlargesTheRegion) {
  for (auto test : {TestFamily::mean, TestFamily::variance}) {
    SearchConfig base;
    base.n = 10000;
    base.budget_s = 2;
    base.alpha = 0.5;
    base.max_refines = 0;
    const auto flat = build_region(test, base, open_unit_axis(50), open_unit_axis(50));
    base.max_refines = 2;
    const auto adaptive = build_region(test, base, open_unit_axis(50), open_unit_axis(50));
    for (std::size_t i = 0; i < flat.cells.size(); ++i)
      if (flat.cells[i].detectable) {
        EXPECT_TRUE(adaptive.cells[i].detectable);
      }
  }
}

TEST(Region, OverlayFillsErrors) {
  SearchConfig base;
  base.n = 300;
  base.t_target = 1;
  base.budget_s = 2;
  base.max_refines = 1;
  base.alpha = 0.5;
  const auto grid = build_region(TestFamily::mean, base, {0.2, 0.9}, {0.5}, RegionOverlay{30, 1, 1});
  ASSERT_TRUE(grid.at(0, 0).empirical_error.has_value());
  EXPECT_GE(*grid.at(0, 0).empirical_error, *grid.at(1, 0).empirical_error);
}
