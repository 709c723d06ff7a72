#pragma once

// Comparators: the plain scan without refinement, a per-stream SPRT and a
// repeated CUSUM that scans streams one at a time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "quicksearch/engine.hpp"
#include "quicksearch/errors.hpp"
#include "quicksearch/model.hpp"
#include "quicksearch/policy.hpp"
#include "quicksearch/rng.hpp"

namespace quicksearch {

// ---- non-adaptive scan --------------------------------------------------

inline Schedule nonadaptive_schedule(const SearchConfig& cfg) {
  SearchConfig flat = cfg;
  flat.max_refines = 0;
  return build_schedule(flat);
}

inline MonteCarloReport run_nonadaptive(const SearchConfig& cfg, const HypothesisPair& pair,
                                        std::int64_t trials, std::uint64_t master_seed,
                                        int threads = 0) {
  SearchConfig flat = cfg;
  flat.max_refines = 0;
  return monte_carlo(flat, pair, build_schedule(flat), trials, master_seed, threads);
}

// ---- SPRT ---------------------------------------------------------------

struct SprtConfig {
  double alpha_err = 0.01;  // P(declare rare | normal)
  double beta_err = 0.01;   // P(declare normal | rare)

  void validate() const {
    if (!(alpha_err > 0.0 && alpha_err < 0.5) || !(beta_err > 0.0 && beta_err < 0.5))
      throw ConfigError("SPRT error targets must lie in (0, 1/2)");
  }
  // Wald thresholds on ln(f1/f0).
  double upper() const { return std::log((1.0 - beta_err) / alpha_err); }
  double lower() const { return std::log(beta_err / (1.0 - alpha_err)); }
};

struct SprtResult {
  bool rare = false;
  std::int64_t samples_used = 0;
  bool truncated = false;
};

// `next()` yields the stream's next sample. The running statistic is
// ln(f0/f1), so rare is declared at -upper() and normal at -lower().
template <class NextSample>
SprtResult run_sprt_per_stream(const HypothesisPair& pair, const SprtConfig& sprt,
                               NextSample&& next, std::int64_t max_samples) {
  sprt.validate();
  if (max_samples < 1) throw ConfigError("SPRT max_samples must be positive");
  const double rare_at = -sprt.upper();
  const double normal_at = -sprt.lower();
  double llr = 0.0;
  for (std::int64_t t = 1; t <= max_samples; ++t) {
    llr += llr_increment(pair, next());
    if (llr <= rare_at) return {true, t, false};
    if (llr >= normal_at) return {false, t, false};
  }
  return {llr < 0.0, max_samples, true};
}

struct SprtReport {
  std::int64_t replicates = 0;
  double false_alarm_rate = 0.0;  // normal streams declared rare
  double miss_rate = 0.0;         // rare streams declared normal
  double mean_samples_normal = 0.0;
  double mean_samples_rare = 0.0;
};

// Runs `replicates` normal and `replicates` rare streams.
inline SprtReport sprt_monte_carlo(const HypothesisPair& pair, const SprtConfig& sprt,
                                   std::int64_t replicates, std::uint64_t master_seed,
                                   std::int64_t max_samples, int threads = 0) {
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  const auto runs = parallel_map<SprtResult>(2 * replicates, threads, [&](std::int64_t i) {
    const bool rare = i >= replicates;
    const CounterRng rng(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
    std::uint64_t counter = 0;
    return run_sprt_per_stream(
        pair, sprt,
        [&] { return sample_increment(pair, rare, rng.normal(0, counter++, RngDomain::scan)); },
        max_samples);
  });
  SprtReport r;
  r.replicates = replicates;
  for (std::int64_t i = 0; i < 2 * replicates; ++i) {
    const auto& run = runs[static_cast<std::size_t>(i)];
    if (i < replicates) {
      r.false_alarm_rate += run.rare ? 1.0 : 0.0;
      r.mean_samples_normal += static_cast<double>(run.samples_used);
    } else {
      r.miss_rate += run.rare ? 0.0 : 1.0;
      r.mean_samples_rare += static_cast<double>(run.samples_used);
    }
  }
  const auto reps = static_cast<double>(replicates);
  r.false_alarm_rate /= reps;
  r.miss_rate /= reps;
  r.mean_samples_normal /= reps;
  r.mean_samples_rare /= reps;
  return r;
}

// Tests streams one at a time in index order with the SPRT until t_target
// are declared rare. Samples share the scan stream of run_repeated_cusum.
struct ScanResult {
  std::vector<std::int64_t> identified;
  std::int64_t total_samples = 0;
  bool partial = false;
  bool error = false;
};

inline ScanResult run_sprt_scan(const SearchConfig& cfg, const HypothesisPair& pair,
                                const SprtConfig& sprt, std::int64_t t_target, std::uint64_t seed,
                                std::int64_t max_samples_per_stream) {
  if (t_target < 1 || t_target > cfg.n) throw ConfigError("t_target must lie in [1, n]");
  const SearchState population = generate_population(cfg, seed);
  const CounterRng rng(seed);
  ScanResult out;
  for (std::int64_t i = 0; i < cfg.n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const bool rare = population.labels[idx];
    std::uint64_t counter = 0;
    const SprtResult r = run_sprt_per_stream(
        pair, sprt,
        [&] { return sample_increment(pair, rare, rng.normal(idx, counter++, RngDomain::scan)); },
        max_samples_per_stream);
    out.total_samples += r.samples_used;
    if (r.rare) {
      out.identified.push_back(i);
      out.error = out.error || !rare;
      if (static_cast<std::int64_t>(out.identified.size()) == t_target) return out;
    }
  }
  out.partial = true;
  out.error = true;
  return out;
}

// ---- repeated CUSUM -----------------------------------------------------

enum class CusumAbandon {
  cap,    // leave a stream after ceil(cap_multiplier * threshold / KL(f1||f0)) samples
  reset,  // leave a stream as soon as its statistic returns to zero (or at the cap)
};

struct CusumConfig {
  double threshold = 1.0;
  double target_error = 1e-2;
  CusumAbandon abandon = CusumAbandon::cap;
  double cap_multiplier = 4.0;
  // Sweeps over the undeclared streams before giving up; later sweeps restart
  // each stream's statistic at zero.
  int max_sweeps = 1;

  void validate() const {
    if (!(threshold >= 0.0) || !std::isfinite(threshold))
      throw ConfigError("CUSUM threshold must be non-negative");
    if (!(cap_multiplier > 0.0)) throw ConfigError("CUSUM cap multiplier must be positive");
    if (max_sweeps < 1) throw ConfigError("CUSUM needs at least one sweep");
  }

  std::int64_t per_stream_cap(const HypothesisPair& pair) const {
    const double cap = std::ceil(cap_multiplier * threshold / kl_rare_vs_normal(pair));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(cap));
  }
};

struct CusumResult {
  std::vector<std::int64_t> identified;
  std::int64_t total_samples = 0;
  bool partial = false;  // fewer than t_target declarations
  bool error = false;    // partial, or a normal stream was declared
};

// Scans the population of `cfg` (same labels as the engine for this seed) in
// index order until t_target streams are declared rare.
inline CusumResult run_repeated_cusum(const SearchConfig& cfg, const HypothesisPair& pair,
                                      const CusumConfig& cusum, std::int64_t t_target,
                                      std::uint64_t seed) {
  cusum.validate();
  if (t_target < 1 || t_target > cfg.n) throw ConfigError("t_target must lie in [1, n]");
  const SearchState population = generate_population(cfg, seed);
  const CounterRng rng(seed);
  const std::int64_t cap = cusum.per_stream_cap(pair);
  const SampleMap sample = sample_map(pair);
  const LlrMap llr = llr_map(pair);
  std::vector<std::uint64_t> drawn(static_cast<std::size_t>(cfg.n), 0);
  std::vector<bool> declared(static_cast<std::size_t>(cfg.n), false);
  CusumResult out;
  for (int sweep = 0; sweep < cusum.max_sweeps; ++sweep) {
    for (std::int64_t i = 0; i < cfg.n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      if (declared[idx]) continue;
      const bool rare = population.labels[idx];
      double w = 0.0;
      for (std::int64_t j = 0; j < cap; ++j) {
        const double x = sample(rare, rng.normal(idx, drawn[idx]++, RngDomain::scan));
        ++out.total_samples;
        w = std::max(0.0, w - llr(x));
        if (w >= cusum.threshold) {
          declared[idx] = true;
          out.identified.push_back(i);
          out.error = out.error || !rare;
          break;
        }
        if (cusum.abandon == CusumAbandon::reset && w == 0.0) break;
      }
      if (static_cast<std::int64_t>(out.identified.size()) == t_target) return out;
    }
  }
  out.partial = true;
  out.error = true;
  return out;
}

struct CusumReport {
  std::int64_t trials = 0;
  double threshold = 0.0;
  double error_rate = 0.0;
  double mean_samples = 0.0;
  double partial_rate = 0.0;
};

inline CusumReport cusum_monte_carlo(const SearchConfig& cfg, const HypothesisPair& pair,
                                     const CusumConfig& cusum, std::int64_t t_target,
                                     const std::vector<std::uint64_t>& seeds, int threads = 0) {
  if (seeds.empty()) throw ConfigError("CUSUM Monte Carlo needs at least one seed");
  const auto runs = parallel_map<CusumResult>(
      static_cast<std::int64_t>(seeds.size()), threads, [&](std::int64_t i) {
        return run_repeated_cusum(cfg, pair, cusum, t_target, seeds[static_cast<std::size_t>(i)]);
      });
  CusumReport r;
  r.trials = static_cast<std::int64_t>(seeds.size());
  r.threshold = cusum.threshold;
  for (const auto& run : runs) {
    r.error_rate += run.error ? 1.0 : 0.0;
    r.partial_rate += run.partial ? 1.0 : 0.0;
    r.mean_samples += static_cast<double>(run.total_samples);
  }
  const auto t = static_cast<double>(r.trials);
  r.error_rate /= t;
  r.partial_rate /= t;
  r.mean_samples /= t;
  return r;
}

namespace detail {

// Runs fn(0..count-1) in chunks and stops after the chunk in which more than
// `max_failures` results are failures. The returned vector is complete when
// the failure budget holds; the verdict does not depend on the thread count.
template <class Result, class Fn, class IsFailure>
std::vector<Result> run_until_failures(std::int64_t count, int threads, std::int64_t max_failures,
                                       Fn&& fn, IsFailure&& is_failure) {
  const std::int64_t chunk = std::max<std::int64_t>(16, 4 * resolve_threads(threads));
  std::vector<Result> out;
  out.reserve(static_cast<std::size_t>(count));
  std::int64_t failures = 0;
  for (std::int64_t start = 0; start < count && failures <= max_failures; start += chunk) {
    auto part = parallel_map<Result>(std::min(chunk, count - start), threads,
                                     [&](std::int64_t i) { return fn(start + i); });
    for (auto& r : part) {
      failures += is_failure(r) ? 1 : 0;
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline std::int64_t allowed_failures(double target_error, std::size_t trials) {
  return static_cast<std::int64_t>(std::floor(target_error * static_cast<double>(trials) + 1e-9));
}

}  // namespace detail

// Trial seeds whose population holds at least `min_rare` rare streams.
inline std::vector<std::uint64_t> conditioned_seeds(const SearchConfig& cfg, std::int64_t count,
                                                    std::uint64_t master_seed,
                                                    std::int64_t min_rare) {
  if (cfg.epsilon <= 0.0 && min_rare > 0) throw ConfigError("no rare streams can occur");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; static_cast<std::int64_t>(seeds.size()) < count; ++i) {
    const std::uint64_t seed = derive_seed(master_seed, i);
    if (generate_population(cfg, seed).n1 >= min_rare) seeds.push_back(seed);
  }
  return seeds;
}

namespace detail {

// One population's CUSUM paths under the cap rule with a single sweep. A
// stream's path does not depend on the threshold, so it is simulated once and
// kept as its running-maximum records; any threshold is then answered by
// lookup, with the same result as run_repeated_cusum.
class CusumPaths {
 public:
  CusumPaths(const SearchConfig& cfg, const HypothesisPair& pair, std::uint64_t seed)
      : population_(generate_population(cfg, seed)),
        rng_(seed),
        sample_(sample_map(pair)),
        llr_(llr_map(pair)),
        streams_(static_cast<std::size_t>(cfg.n)) {}

  CusumResult run(double threshold, std::int64_t cap, std::int64_t t_target) {
    CusumResult out;
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      Stream& st = streams_[i];
      extend(i, cap);
      const auto hit = std::lower_bound(st.record_values.begin(), st.record_values.end(), threshold);
      const auto pos = static_cast<std::size_t>(hit - st.record_values.begin());
      if (hit != st.record_values.end() && st.record_times[pos] <= cap) {
        out.total_samples += st.record_times[pos];
        out.identified.push_back(static_cast<std::int64_t>(i));
        out.error = out.error || !population_.labels[i];
        if (static_cast<std::int64_t>(out.identified.size()) == t_target) return out;
      } else {
        out.total_samples += cap;
      }
    }
    out.partial = true;
    out.error = true;
    return out;
  }

 private:
  struct Stream {
    std::int64_t drawn = 0;
    double w = 0.0;
    std::vector<double> record_values;  // strictly increasing running maxima
    std::vector<std::int64_t> record_times;
  };

  void extend(std::size_t i, std::int64_t horizon) {
    Stream& st = streams_[i];
    const bool rare = population_.labels[i];
    while (st.drawn < horizon) {
      const double x = sample_(rare, rng_.normal(i, static_cast<std::uint64_t>(st.drawn), RngDomain::scan));
      ++st.drawn;
      st.w = std::max(0.0, st.w - llr_(x));
      if (st.record_values.empty() || st.w > st.record_values.back()) {
        st.record_values.push_back(st.w);
        st.record_times.push_back(st.drawn);
      }
    }
  }

  SearchState population_;
  CounterRng rng_;
  SampleMap sample_;
  LlrMap llr_;
  std::vector<Stream> streams_;
};

}  // namespace detail

// Smallest threshold (to `rel_tol`) whose Monte Carlo error meets the target,
// assuming the error falls as the threshold grows. Thresholds that miss the
// target are abandoned as soon as that is certain.
inline CusumReport calibrate_cusum(const SearchConfig& cfg, const HypothesisPair& pair,
                                   CusumConfig cusum, std::int64_t t_target,
                                   const std::vector<std::uint64_t>& seeds, int threads = 0,
                                   double rel_tol = 0.02) {
  if (seeds.empty()) throw ConfigError("CUSUM calibration needs at least one seed");
  cusum.validate();
  if (t_target < 1 || t_target > cfg.n) throw ConfigError("t_target must lie in [1, n]");
  const std::int64_t max_errors = detail::allowed_failures(cusum.target_error, seeds.size());
  const bool cached = cusum.abandon == CusumAbandon::cap && cusum.max_sweeps == 1;
  std::vector<std::optional<detail::CusumPaths>> paths(seeds.size());
  // Report at h, or nullopt when h misses the target.
  const auto eval = [&](double h) -> std::optional<CusumReport> {
    cusum.threshold = h;
    const std::int64_t cap = cusum.per_stream_cap(pair);
    const auto runs = detail::run_until_failures<CusumResult>(
        static_cast<std::int64_t>(seeds.size()), threads, max_errors,
        [&](std::int64_t i) {
          const auto idx = static_cast<std::size_t>(i);
          if (!cached) return run_repeated_cusum(cfg, pair, cusum, t_target, seeds[idx]);
          if (!paths[idx]) paths[idx].emplace(cfg, pair, seeds[idx]);
          return paths[idx]->run(h, cap, t_target);
        },
        [](const CusumResult& r) { return r.error; });
    CusumReport r;
    r.trials = static_cast<std::int64_t>(runs.size());
    r.threshold = h;
    std::int64_t errors = 0;
    for (const auto& run : runs) {
      errors += run.error ? 1 : 0;
      r.partial_rate += run.partial ? 1.0 : 0.0;
      r.mean_samples += static_cast<double>(run.total_samples);
    }
    if (errors > max_errors) return std::nullopt;
    const auto t = static_cast<double>(r.trials);
    r.error_rate = static_cast<double>(errors) / t;
    r.partial_rate /= t;
    r.mean_samples /= t;
    return r;
  };
  double hi = 1.0;
  auto at_hi = eval(hi);
  while (!at_hi) {
    hi *= 2.0;
    if (hi > 1e4) throw InfeasibleSchedule("CUSUM cannot reach the target error");
    at_hi = eval(hi);
  }
  double lo = 0.0;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (auto r = eval(mid)) {
      hi = mid;
      at_hi = r;
    } else {
      lo = mid;
    }
  }
  return *at_hi;
}

// ---- adaptive budget search ---------------------------------------------

struct AdaptiveBudget {
  int refinements = 0;
  std::int64_t tau = 0;
  std::int64_t total_samples = 0;
  double error_rate = 0.0;
};

inline std::vector<bool> refine_first_psi(int k, std::int64_t tau) {
  std::vector<bool> psi(static_cast<std::size_t>(tau - 1), false);
  std::fill_n(psi.begin(), k, true);
  return psi;
}

inline double schedule_error(const SearchConfig& cfg, const HypothesisPair& pair,
                             const Schedule& schedule, const std::vector<std::uint64_t>& seeds,
                             int threads) {
  const auto runs = parallel_map<TrialOutcome>(
      static_cast<std::int64_t>(seeds.size()), threads, [&](std::int64_t i) {
        return run_trial(cfg, pair, schedule, seeds[static_cast<std::size_t>(i)]);
      });
  return summarize(runs).error_rate;
}

// Fewest total samples over refine-first schedules with at most `max_k`
// refinements whose Monte Carlo error is at most `target_error`. With common
// random numbers a longer schedule only appends observation rounds, so each K
// runs every trial forward one round at a time and stops at the first
// stopping time that meets the target, or once it costs as much as the best
// schedule found so far.
inline std::optional<AdaptiveBudget> minimal_adaptive_budget(
    const SearchConfig& cfg, const HypothesisPair& pair, int max_k, double target_error,
    const std::vector<std::uint64_t>& seeds, int threads = 0, std::int64_t max_tau = 4096) {
  if (seeds.empty()) throw ConfigError("adaptive budget search needs at least one seed");
  cfg.validate();
  const std::int64_t max_errors = detail::allowed_failures(target_error, seeds.size());
  const auto trials = static_cast<std::int64_t>(seeds.size());
  std::optional<AdaptiveBudget> best;
  // More refinements are usually cheaper, so trying them first prunes the rest.
  for (int k = max_k; k >= 0; --k) {
    if (k + 1 > max_tau) continue;
    const Schedule prefix = schedule_from_psi(cfg.n, cfg.t_target, cfg.alpha, refine_first_psi(k, k + 1));
    const std::int64_t final_size = prefix.active_sizes.back();
    std::int64_t samples = prefix.total_samples;
    auto states = parallel_map<SearchState>(trials, threads, [&](std::int64_t i) {
      SearchState st = generate_population(cfg, seeds[static_cast<std::size_t>(i)]);
      for (int t = 0; t < k; ++t) {
        observe_round(st, pair);
        refine_round(st, cfg.t_target, cfg.alpha);
      }
      return st;
    });
    // Trials whose refinements dropped below T_n rare streams err at every tau.
    std::int64_t doomed = 0;
    for (const auto& st : states) doomed += st.rare_active() < cfg.t_target ? 1 : 0;
    if (doomed > max_errors) continue;
    for (std::int64_t tau = k + 1; tau <= max_tau; ++tau, samples += final_size) {
      if (best && samples >= best->total_samples) break;
      const auto errors = parallel_map<char>(trials, threads, [&](std::int64_t i) -> char {
        SearchState& st = states[static_cast<std::size_t>(i)];
        observe_round(st, pair);
        if (st.samples_used != samples) throw std::logic_error("adaptive search left the schedule");
        return detection_error(st, cfg.t_target) ? 1 : 0;
      });
      std::int64_t count = 0;
      for (char e : errors) count += e;
      if (count <= max_errors) {
        best = AdaptiveBudget{k, tau, samples, static_cast<double>(count) / static_cast<double>(trials)};
        break;
      }
    }
  }
  return best;
}

}  // namespace quicksearch
