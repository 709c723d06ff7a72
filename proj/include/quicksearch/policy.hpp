#pragma once

// Open-loop sampling schedule: how many refinements to run, when to stop,
// and how many streams are active in every round.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "quicksearch/errors.hpp"

namespace quicksearch {

namespace detail {

// Floor that absorbs representation error such as 0.29 * 100 = 28.999999999999996.
inline double robust_floor(double x) { return std::floor(x + 1e-12 * std::fabs(x) + 1e-9); }

}  // namespace detail

struct SearchConfig {
  std::int64_t n = 0;           // stream count
  double epsilon = 0.0;         // prior probability of a rare stream
  std::int64_t t_target = 1;    // streams returned by detection
  double budget_s = 1.0;        // total samples / n
  int max_refines = 0;          // K
  double alpha = 0.5;           // survival fraction per refinement

  void validate() const {
    if (n < 1) throw ConfigError("n must be positive");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
    if (t_target < 1 || t_target > n) throw ConfigError("t_target must lie in [1, n]");
    if (!(budget_s >= 1.0) || !std::isfinite(budget_s))
      throw ConfigError("budget_s must be at least 1 (one full observation pass)");
    if (max_refines < 0) throw ConfigError("max_refines must be non-negative");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  }

  // Largest admissible total sample count, floor(S * n).
  std::int64_t budget_cap() const {
    return static_cast<std::int64_t>(detail::robust_floor(budget_s * static_cast<double>(n)));
  }
};

// Regime indicators for a configuration. Recorded for reports, never enforced.
struct RegimeReport {
  double prior = 0.0;             // should be small
  double expected_rare = 0.0;     // n * epsilon, should be large
  double target_fraction = 0.0;   // t_target / (n * epsilon), should be small
};

inline RegimeReport regime_report(const SearchConfig& cfg) {
  RegimeReport r;
  r.prior = cfg.epsilon;
  r.expected_rare = static_cast<double>(cfg.n) * cfg.epsilon;
  r.target_fraction = r.expected_rare > 0.0 ? static_cast<double>(cfg.t_target) / r.expected_rare
                                            : INFINITY;
  return r;
}

struct Schedule {
  int k_star = 0;
  std::int64_t tau = 1;
  std::int64_t tau_asymptotic = 1;       // tau before the finite-n budget trim
  std::vector<bool> psi;                 // length tau - 1; true = refine after that round
  std::vector<std::int64_t> active_sizes;  // |L_t| for t = 1..tau
  std::int64_t total_samples = 0;
  std::int64_t budget_cap = 0;
  bool trimmed = false;

  int refinements() const { return static_cast<int>(std::count(psi.begin(), psi.end(), true)); }
};

// ln(n * eps) / ln(n).
inline double epsilon_exponent(std::int64_t n, double epsilon) {
  if (n < 2) throw DomainError("epsilon_exponent requires n >= 2");
  const double ne = static_cast<double>(n) * epsilon;
  if (!(ne > 0.0)) throw DomainError("epsilon_exponent requires n * epsilon > 0");
  return std::log(ne) / std::log(static_cast<double>(n));
}

// Prior that corresponds to a given exponent: n^(exponent - 1).
inline double epsilon_from_exponent(std::int64_t n, double exponent) {
  return std::pow(static_cast<double>(n), exponent - 1.0);
}

// floor(alpha * (active - t_target)) + t_target streams survive a refinement.
inline std::int64_t retained_count(std::int64_t active, std::int64_t t_target, double alpha) {
  if (active < t_target) throw DomainError("retained_count requires active >= t_target");
  const auto excess = static_cast<double>(active - t_target);
  return static_cast<std::int64_t>(detail::robust_floor(alpha * excess)) + t_target;
}

// Refinements pay off iff alpha <= 1 - 1/S (boundary inclusive).
inline int optimal_k(double budget_s, int max_refines, double alpha) {
  if (!(budget_s >= 1.0)) throw DomainError("optimal_k requires budget_s >= 1");
  return alpha <= 1.0 - 1.0 / budget_s + 1e-12 ? max_refines : 0;
}

// Observation rounds funded after k refinements:
// floor(S * alpha^-k + (1 - alpha^-k) / (1 - alpha)).
inline std::int64_t s_of_k(double budget_s, int k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("s_of_k requires alpha in (0, 1)");
  if (k < 0) throw DomainError("s_of_k requires k >= 0");
  const double inv = std::pow(alpha, -static_cast<double>(k));
  const double value = detail::robust_floor(budget_s * inv + (1.0 - inv) / (1.0 - alpha));
  if (value < 1.0)
    throw InfeasibleSchedule("budget cannot fund an observation round after " +
                             std::to_string(k) + " refinements");
  return static_cast<std::int64_t>(value);
}

// Large-n optimal stopping time: K + s(K) on the refining branch, floor(S) otherwise.
inline std::int64_t asymptotic_tau(double budget_s, int max_refines, double alpha) {
  const int k = optimal_k(budget_s, max_refines, alpha);
  if (k == 0) return static_cast<std::int64_t>(detail::robust_floor(budget_s));
  return k + s_of_k(budget_s, k, alpha);
}

// |L_t| for t = 1..psi.size()+1 when refinements follow psi.
inline std::vector<std::int64_t> active_sizes_for(std::int64_t n, std::int64_t t_target,
                                                  double alpha, const std::vector<bool>& psi) {
  std::vector<std::int64_t> sizes;
  sizes.reserve(psi.size() + 1);
  sizes.push_back(n);
  for (bool refine : psi)
    sizes.push_back(refine ? retained_count(sizes.back(), t_target, alpha) : sizes.back());
  return sizes;
}

inline std::int64_t total_samples(const std::vector<std::int64_t>& sizes) {
  std::int64_t total = 0;
  for (auto s : sizes) total += s;
  return total;
}

// Schedule for an explicit switching sequence; stops after psi.size()+1 rounds.
inline Schedule schedule_from_psi(std::int64_t n, std::int64_t t_target, double alpha,
                                  std::vector<bool> psi) {
  Schedule s;
  s.active_sizes = active_sizes_for(n, t_target, alpha, psi);
  s.psi = std::move(psi);
  s.k_star = s.refinements();
  s.tau = static_cast<std::int64_t>(s.active_sizes.size());
  s.tau_asymptotic = s.tau;
  s.total_samples = total_samples(s.active_sizes);
  s.budget_cap = s.total_samples;
  return s;
}

// Refinements first, then observation rounds. At finite n the floors can push
// the asymptotic schedule past the hard budget; trailing rounds are then
// dropped until the total fits. Leftover budget is not spent.
inline Schedule build_schedule(const SearchConfig& cfg) {
  cfg.validate();
  Schedule s;
  s.k_star = optimal_k(cfg.budget_s, cfg.max_refines, cfg.alpha);
  s.tau_asymptotic = asymptotic_tau(cfg.budget_s, cfg.max_refines, cfg.alpha);
  s.budget_cap = cfg.budget_cap();

  std::vector<std::int64_t> sizes{cfg.n};
  std::int64_t prefix = 0;
  for (int t = 0; t < s.k_star; ++t) {
    prefix += sizes.back();
    sizes.push_back(retained_count(sizes.back(), cfg.t_target, cfg.alpha));
  }
  const std::int64_t final_size = sizes.back();
  if (prefix + final_size > s.budget_cap)
    throw InfeasibleSchedule("budget cannot fund " + std::to_string(s.k_star) +
                             " refinements followed by an observation round");

  const std::int64_t affordable = s.k_star + (s.budget_cap - prefix) / final_size;
  s.tau = std::min(s.tau_asymptotic, affordable);
  s.trimmed = s.tau < s.tau_asymptotic;
  if (s.tau < s.k_star + 1)
    throw InfeasibleSchedule("stopping time shorter than the refinement phase");

  sizes.resize(static_cast<std::size_t>(s.tau), final_size);
  s.active_sizes = std::move(sizes);
  s.psi.assign(static_cast<std::size_t>(s.tau - 1), false);
  std::fill_n(s.psi.begin(), s.k_star, true);
  s.total_samples = prefix + (s.tau - s.k_star) * final_size;
  return s;
}

}  // namespace quicksearch
