#include <cmath>

#include <gtest/gtest.h>

#include "quicksearch/baselines.hpp"

using namespace quicksearch;

namespace {

SearchConfig config(std::int64_t n, double eps, std::int64_t t, double s, int k, double alpha) {
  SearchConfig c;
  c.n = n;
  c.epsilon = eps;
  c.t_target = t;
  c.budget_s = s;
  c.max_refines = k;
  c.alpha = alpha;
  return c;
}

}  // namespace

TEST(NonAdaptive, MatchesEngineWithFlatSchedule) {
  const auto cfg = config(500, 0.05, 2, 3, 2, 0.5);
  const auto pair = HypothesisPair::mean(1.5, 0.0);
  const auto a = run_nonadaptive(cfg, pair, 50, 42, 1);
  auto flat = cfg;
  flat.max_refines = 0;
  const auto b = monte_carlo(flat, pair, build_schedule(flat), 50, 42, 1);
  EXPECT_EQ(a.errors, b.errors);
  EXPECT_EQ(a.mean_samples, b.mean_samples);
  EXPECT_EQ(a.mean_rare_retention, b.mean_rare_retention);
  EXPECT_EQ(nonadaptive_schedule(config(80, 0.1, 1, 1, 3, 0.5)).tau, 1);
}

TEST(Sprt, WaldThresholds) {
  const SprtConfig s{0.01, 0.01};
  EXPECT_NEAR(s.upper(), 4.59511985013458993, 1e-14);
  EXPECT_NEAR(s.lower(), -4.59511985013458993, 1e-14);
  EXPECT_THROW((SprtConfig{0.6, 0.1}.validate()), ConfigError);
}

TEST(Sprt, DriftDecides) {
  const auto pair = HypothesisPair::mean(1.0, 0.0);
  const auto normal = run_sprt_per_stream(pair, SprtConfig{}, [] { return 5.0; }, 100);
  EXPECT_FALSE(normal.rare);
  EXPECT_FALSE(normal.truncated);
  const auto rare = run_sprt_per_stream(pair, SprtConfig{}, [] { return -5.0; }, 100);
  EXPECT_TRUE(rare.rare);
  const auto cut = run_sprt_per_stream(pair, SprtConfig{}, [] { return 0.4; }, 3);
  EXPECT_TRUE(cut.truncated);
  EXPECT_TRUE(cut.rare);
}

TEST(Sprt, ErrorRatesRespectWald) {
  const SprtConfig cfg{0.05, 0.05};
  const auto r = sprt_monte_carlo(HypothesisPair::mean(1.0, 0.0), cfg, 10000, 8, 100000);
  const double slack = 3 * std::sqrt(0.05 * 0.95 / 10000);
  EXPECT_LE(r.false_alarm_rate, cfg.alpha_err / (1 - cfg.beta_err) + slack);
  EXPECT_LE(r.miss_rate, cfg.beta_err / (1 - cfg.alpha_err) + slack);
  EXPECT_GT(r.mean_samples_normal, 1.0);
}

TEST(Cusum, ZeroThresholdDeclaresImmediately) {
  const auto cfg = config(200, 0.1, 5, 1, 0, 0.5);
  CusumConfig c;
  c.threshold = 0.0;
  const auto r = run_repeated_cusum(cfg, HypothesisPair::variance(4, 1), c, 5, 3);
  EXPECT_EQ(r.identified, (std::vector<std::int64_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(r.total_samples, 5);
  EXPECT_FALSE(r.partial);
}

TEST(Cusum, StrongRareStreamDeclaredQuickly) {
  const auto cfg = config(50, 1.0, 1, 1, 0, 0.5);
  CusumConfig c;
  c.threshold = 5.0;
  const auto r = run_repeated_cusum(cfg, HypothesisPair::variance(1e4, 1), c, 1, 17);
  EXPECT_FALSE(r.error);
  EXPECT_LE(r.total_samples, 3);
}

TEST(Cusum, PartialWhenNotEnoughRare) {
  const auto cfg = config(30, 0.0, 1, 1, 0, 0.5);
  CusumConfig c;
  c.threshold = 8.0;
  const auto r = run_repeated_cusum(cfg, HypothesisPair::mean(3, 0), c, 1, 2);
  EXPECT_TRUE(r.partial);
  EXPECT_TRUE(r.error);
  EXPECT_EQ(r.total_samples, 30 * c.per_stream_cap(HypothesisPair::mean(3, 0)));
}

TEST(Cusum, ResetRuleNeverDelaysADetectionOnTheSamePath) {
  // All streams rare: when both rules declare stream 0, they stop at the same sample.
  const auto cfg = config(50, 1.0, 1, 1, 0, 0.5);
  const auto pair = HypothesisPair::mean(1.0, 0.0);
  CusumConfig capped;
  capped.threshold = 4.0;
  CusumConfig reset = capped;
  reset.abandon = CusumAbandon::reset;
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a = run_repeated_cusum(cfg, pair, capped, 1, seed);
    const auto b = run_repeated_cusum(cfg, pair, reset, 1, seed);
    ASSERT_FALSE(a.identified.empty());
    ASSERT_FALSE(b.identified.empty());
    EXPECT_GE(b.identified[0], a.identified[0]);
    if (b.identified[0] == 0) {
      EXPECT_EQ(a.identified[0], 0);
      EXPECT_EQ(a.total_samples, b.total_samples);
      ++compared;
    }
  }
  EXPECT_GT(compared, 0);
}

TEST(Cusum, CalibrationMeetsTarget) {
  const auto cfg = config(300, 0.05, 2, 1, 0, 0.5);
  const auto pair = HypothesisPair::mean(1.5, 0.0);
  const auto seeds = conditioned_seeds(cfg, 100, 5, 2);
  for (auto s : seeds) EXPECT_GE(generate_population(cfg, s).n1, 2);
  CusumConfig c;
  c.target_error = 0.05;
  const auto r = calibrate_cusum(cfg, pair, c, 2, seeds, 1);
  EXPECT_LE(r.error_rate, 0.05);
  EXPECT_GT(r.threshold, 0.0);
}

TEST(Cusum, CachedPathsReplayDirectScans) {
  const auto cfg = config(300, 0.05, 2, 1, 0, 0.5);
  const auto pair = HypothesisPair::variance(2.0, 1.0);
  for (std::uint64_t seed : {3u, 17u, 99u}) {
    detail::CusumPaths paths(cfg, pair, seed);
    for (double h : {0.0, 0.5, 3.0, 1.2, 6.0}) {
      CusumConfig c;
      c.threshold = h;
      const CusumResult direct = run_repeated_cusum(cfg, pair, c, 2, seed);
      const CusumResult cached = paths.run(h, c.per_stream_cap(pair), 2);
      EXPECT_EQ(cached.identified, direct.identified) << seed << " " << h;
      EXPECT_EQ(cached.total_samples, direct.total_samples) << seed << " " << h;
      EXPECT_EQ(cached.error, direct.error);
      EXPECT_EQ(cached.partial, direct.partial);
    }
  }
}

TEST(AdaptiveBudget, FindsAFeasibleSchedule) {
  const auto cfg = config(400, 0.05, 2, 1, 0, 0.5);
  const auto pair = HypothesisPair::mean(2.0, 0.0);
  const auto seeds = conditioned_seeds(cfg, 60, 9, 2);
  const auto best = minimal_adaptive_budget(cfg, pair, 2, 0.05, seeds, 1);
  ASSERT_TRUE(best.has_value());
  EXPECT_LE(best->error_rate, 0.05);
  EXPECT_EQ(refine_first_psi(2, 5), (std::vector<bool>{true, true, false, false}));

  // The reported schedule replays to the same error, and one round fewer misses the target.
  const auto replay = [&](std::int64_t tau) {
    const Schedule s = schedule_from_psi(cfg.n, cfg.t_target, cfg.alpha, refine_first_psi(best->refinements, tau));
    return std::pair{schedule_error(cfg, pair, s, seeds, 1), s.total_samples};
  };
  const auto [err, samples] = replay(best->tau);
  EXPECT_EQ(err, best->error_rate);
  EXPECT_EQ(samples, best->total_samples);
  if (best->tau > best->refinements + 1) {
    EXPECT_GT(replay(best->tau - 1).first, 0.05);
  }
}
