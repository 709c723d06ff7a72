#pragma once

// Search trials: population generation, scheduled observe/refine rounds,
// detection, and Monte Carlo estimation of the detection error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "quicksearch/model.hpp"
#include "quicksearch/policy.hpp"
#include "quicksearch/rng.hpp"

namespace quicksearch {

// Labels are hidden ground truth: selection code never reads them, only the
// evaluator and the retention diagnostics do.
struct SearchState {
  std::vector<std::int64_t> active;     // ascending stream indices
  std::vector<SufficientStat> stats;    // one per stream, kept after discard
  std::vector<bool> labels;             // true = rare
  std::int64_t round = 0;               // observation rounds taken
  std::int64_t samples_used = 0;
  std::uint64_t seed = 0;
  std::int64_t n1 = 0;                  // initial rare count
  std::vector<std::int64_t> rare_retained_per_refine;

  std::int64_t rare_active() const {
    std::int64_t c = 0;
    for (auto i : active) c += labels[static_cast<std::size_t>(i)] ? 1 : 0;
    return c;
  }
};

struct TrialOutcome {
  std::vector<std::int64_t> selected;
  bool error = false;
  std::vector<std::int64_t> rare_retained_per_refine;
  std::int64_t samples_used = 0;
  std::int64_t n1 = 0;
  std::int64_t n_rare_final = 0;    // rare streams active at detection
  std::int64_t n_normal_final = 0;  // normal streams active at detection
};

struct MonteCarloReport {
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  double error_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double mean_samples = 0.0;
  std::int64_t max_samples = 0;
  double mean_rare_retention = 0.0;  // over trials with at least one rare stream
};

// 95% Wilson score interval for `errors` successes out of `trials`.
inline std::pair<double, double> wilson_interval(std::int64_t errors, std::int64_t trials) {
  if (trials <= 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / nt;
  const double denom = 1.0 + z * z / nt;
  const double centre = (p + z * z / (2.0 * nt)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nt + z * z / (4.0 * nt * nt));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline SearchState generate_population(const SearchConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const CounterRng rng(seed);
  SearchState s;
  s.seed = seed;
  const auto n = static_cast<std::size_t>(cfg.n);
  s.labels.resize(n);
  s.stats.assign(n, SufficientStat{});
  s.active.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.active[i] = static_cast<std::int64_t>(i);
    const bool rare = rng.uniform(i, 0, RngDomain::label) < cfg.epsilon;
    s.labels[i] = rare;
    s.n1 += rare ? 1 : 0;
  }
  return s;
}

// One fresh sample from every active stream. `draw(stream, round)` supplies
// the standard normal variate.
template <class DrawFn>
void observe_round(SearchState& state, const HypothesisPair& pair, DrawFn&& draw) {
  const SampleMap map = sample_map(pair);
  const bool squared = !pair.is_mean();
  for (auto i : state.active) {
    const auto idx = static_cast<std::size_t>(i);
    const double x = map(state.labels[idx], draw(i, state.round));
    state.stats[idx].value += squared ? x * x : x;
    ++state.stats[idx].count;
  }
  state.samples_used += static_cast<std::int64_t>(state.active.size());
  ++state.round;
}

inline void observe_round(SearchState& state, const HypothesisPair& pair) {
  const CounterRng rng(state.seed);
  observe_round(state, pair, [&](std::int64_t stream, std::int64_t round) {
    return rng.normal(static_cast<std::uint64_t>(stream), static_cast<std::uint64_t>(round));
  });
}

namespace detail {

// Ascending statistic, then ascending stream index.
struct StatOrder {
  const std::vector<SufficientStat>* stats;
  bool operator()(std::int64_t a, std::int64_t b) const {
    const double va = ordering_statistic((*stats)[static_cast<std::size_t>(a)]);
    const double vb = ordering_statistic((*stats)[static_cast<std::size_t>(b)]);
    return va < vb || (va == vb && a < b);
  }
};

}  // namespace detail

// Keep the retained_count(|active|, T, alpha) streams with the smallest statistic.
inline void refine_round(SearchState& state, std::int64_t t_target, double alpha) {
  const auto active = static_cast<std::int64_t>(state.active.size());
  if (active < t_target) throw std::logic_error("refine_round: fewer active streams than T_n");
  const std::int64_t keep = retained_count(active, t_target, alpha);
  const detail::StatOrder order{&state.stats};
  std::nth_element(state.active.begin(), state.active.begin() + keep, state.active.end(), order);
  state.active.resize(static_cast<std::size_t>(keep));
  std::sort(state.active.begin(), state.active.end());
  state.rare_retained_per_refine.push_back(state.rare_active());
}

// Select the T_n smallest statistics. The error flag is computed twice, by
// set membership and by comparing the T_n-th smallest rare statistic with the
// smallest normal one; the two must agree.
inline TrialOutcome detect(const SearchState& state, std::int64_t t_target) {
  if (static_cast<std::int64_t>(state.active.size()) < t_target)
    throw std::logic_error("detect: fewer active streams than T_n");
  const detail::StatOrder order{&state.stats};
  TrialOutcome out;
  out.selected = state.active;
  std::partial_sort(out.selected.begin(), out.selected.begin() + t_target, out.selected.end(),
                    order);
  out.selected.resize(static_cast<std::size_t>(t_target));
  for (auto i : out.selected)
    if (!state.labels[static_cast<std::size_t>(i)]) out.error = true;

  std::vector<std::int64_t> rare;
  std::vector<std::int64_t> normal;
  for (auto i : state.active) (state.labels[static_cast<std::size_t>(i)] ? rare : normal).push_back(i);
  bool order_error = true;
  if (static_cast<std::int64_t>(rare.size()) >= t_target) {
    std::nth_element(rare.begin(), rare.begin() + (t_target - 1), rare.end(), order);
    const auto rare_t = rare[static_cast<std::size_t>(t_target - 1)];
    order_error = !normal.empty() &&
                  order(*std::min_element(normal.begin(), normal.end(), order), rare_t);
  }
  if (order_error != out.error)
    throw std::logic_error("detect: set-membership and order-statistic error tests disagree");

  out.rare_retained_per_refine = state.rare_retained_per_refine;
  out.samples_used = state.samples_used;
  out.n1 = state.n1;
  out.n_rare_final = static_cast<std::int64_t>(rare.size());
  out.n_normal_final = static_cast<std::int64_t>(normal.size());
  return out;
}

// The error flag of detect(state, t_target) without building the selection:
// fewer than T_n rare streams order before the best normal stream.
inline bool detection_error(const SearchState& state, std::int64_t t_target) {
  const detail::StatOrder order{&state.stats};
  std::int64_t best_normal = -1;
  for (auto i : state.active)
    if (!state.labels[static_cast<std::size_t>(i)] && (best_normal < 0 || order(i, best_normal))) best_normal = i;
  std::int64_t ahead = 0;
  for (auto i : state.active)
    if (state.labels[static_cast<std::size_t>(i)] && (best_normal < 0 || order(i, best_normal))) ++ahead;
  return ahead < t_target;
}

// Runs the schedule with a pair chosen from the freshly generated population
// (`pair_for(state)`); used when the signal strength is tied to realised counts.
template <class PairFor>
TrialOutcome run_trial_with(const SearchConfig& cfg, PairFor&& pair_for, const Schedule& schedule,
                            std::uint64_t seed) {
  if (schedule.active_sizes.empty() || schedule.active_sizes.front() != cfg.n ||
      static_cast<std::int64_t>(schedule.psi.size()) != schedule.tau - 1)
    throw std::logic_error("run_trial: schedule was not built for this configuration");
  SearchState state = generate_population(cfg, seed);
  const HypothesisPair pair = pair_for(std::as_const(state));
  for (std::int64_t t = 1; t <= schedule.tau; ++t) {
    if (static_cast<std::int64_t>(state.active.size()) !=
        schedule.active_sizes[static_cast<std::size_t>(t - 1)])
      throw std::logic_error("run_trial: active set diverged from the schedule");
    observe_round(state, pair);
    if (t < schedule.tau && schedule.psi[static_cast<std::size_t>(t - 1)])
      refine_round(state, cfg.t_target, cfg.alpha);
  }
  if (state.samples_used != schedule.total_samples)
    throw std::logic_error("run_trial: sample ledger does not match the schedule");
  return detect(state, cfg.t_target);
}

inline TrialOutcome run_trial(const SearchConfig& cfg, const HypothesisPair& pair,
                              const Schedule& schedule, std::uint64_t seed) {
  return run_trial_with(cfg, [&](const SearchState&) { return pair; }, schedule, seed);
}

// Worker count: explicit request, else QUICKSEARCH_THREADS, else hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QUICKSEARCH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates fn(i) for i in [0, count) on `threads` workers; results land by index.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::int64_t count, int threads, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(count));
  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::int64_t i = next++; i < count; i = next++) out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline MonteCarloReport summarize(const std::vector<TrialOutcome>& outcomes) {
  MonteCarloReport r;
  r.trials = static_cast<std::int64_t>(outcomes.size());
  double samples = 0.0;
  double retention = 0.0;
  std::int64_t with_rare = 0;
  for (const auto& o : outcomes) {
    r.errors += o.error ? 1 : 0;
    samples += static_cast<double>(o.samples_used);
    r.max_samples = std::max(r.max_samples, o.samples_used);
    if (o.n1 > 0) {
      retention += static_cast<double>(o.n_rare_final) / static_cast<double>(o.n1);
      ++with_rare;
    }
  }
  if (r.trials > 0) {
    r.error_rate = static_cast<double>(r.errors) / static_cast<double>(r.trials);
    r.mean_samples = samples / static_cast<double>(r.trials);
  }
  r.mean_rare_retention = with_rare > 0 ? retention / static_cast<double>(with_rare) : 0.0;
  std::tie(r.wilson_lo, r.wilson_hi) = wilson_interval(r.errors, r.trials);
  return r;
}

// Trial i runs fn(derive_seed(master_seed, i)). Outcomes are ordered by trial
// index, so the report does not depend on the worker count.
template <class TrialFn>
std::vector<TrialOutcome> run_trials(std::int64_t trials, std::uint64_t master_seed, int threads,
                                     TrialFn&& fn) {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  return parallel_map<TrialOutcome>(trials, threads, [&](std::int64_t i) {
    return fn(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
  });
}

inline std::vector<TrialOutcome> run_trials(const SearchConfig& cfg, const HypothesisPair& pair,
                                            const Schedule& schedule, std::int64_t trials,
                                            std::uint64_t master_seed, int threads = 0) {
  return run_trials(trials, master_seed, threads, [&](std::uint64_t seed) {
    return run_trial(cfg, pair, schedule, seed);
  });
}

inline MonteCarloReport monte_carlo(const SearchConfig& cfg, const HypothesisPair& pair,
                                    const Schedule& schedule, std::int64_t trials,
                                    std::uint64_t master_seed, int threads = 0) {
  return summarize(run_trials(cfg, pair, schedule, trials, master_seed, threads));
}

}  // namespace quicksearch
