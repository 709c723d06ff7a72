#pragma once

// Detectability thresholds, error-probability bounds and detectable-region grids.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "quicksearch/engine.hpp"
#include "quicksearch/errors.hpp"
#include "quicksearch/extremes.hpp"
#include "quicksearch/model.hpp"
#include "quicksearch/policy.hpp"

namespace quicksearch {

namespace detail {

inline double log_n(std::int64_t n) {
  if (n < 2) throw DomainError("signal exponents require n >= 2");
  return std::log(static_cast<double>(n));
}

inline void check_exponent(double eps_exp) {
  if (!(eps_exp >= 0.0 && eps_exp <= 1.0)) throw DomainError("prior exponent must lie in [0, 1]");
}

}  // namespace detail

// r_m = (mu0 - mu1)^2 / (2 ln n).
inline double mean_signal_exponent(double gap, std::int64_t n) {
  return gap * gap / (2.0 * detail::log_n(n));
}
inline double mean_signal_exponent(const MeanTest& t, std::int64_t n) {
  return mean_signal_exponent(t.mu0 - t.mu1, n);
}

// xi_v = ln(A0/A1) / ln n.
inline double variance_signal_exponent(double ratio, std::int64_t n) {
  if (!(ratio > 0.0)) throw DomainError("variance ratio must be positive");
  return std::log(ratio) / detail::log_n(n);
}
inline double variance_signal_exponent(const VarianceTest& t, std::int64_t n) {
  return variance_signal_exponent(t.a0 / t.a1, n);
}

// Inverses: the gap / ratio that sits at a given signal exponent.
inline double gap_for_exponent(double r_m, std::int64_t n) {
  return std::sqrt(2.0 * r_m * detail::log_n(n));
}
inline double ratio_for_exponent(double xi_v, std::int64_t n) {
  return std::exp(xi_v * detail::log_n(n));
}

// Stopping time that enters both thresholds.
inline double threshold_tau(double budget_s, int k, double alpha) {
  return static_cast<double>(asymptotic_tau(budget_s, k, alpha));
}

inline double mean_threshold(double eps_exp, double budget_s, int k, double alpha) {
  detail::check_exponent(eps_exp);
  const double d = 1.0 - std::sqrt(eps_exp);
  return d * d / threshold_tau(budget_s, k, alpha);
}

inline double variance_threshold(double eps_exp, double budget_s, int k, double alpha) {
  detail::check_exponent(eps_exp);
  return 2.0 * (1.0 - eps_exp) / threshold_tau(budget_s, k, alpha);
}

enum class RetentionClass { above, below };

// Scale a gap (mean) or ratio (variance) must dominate for refinements to
// keep the rare streams: n^(-eps/2) or eps * ln n.
inline double refinement_retention_scale(TestFamily test, std::int64_t n, double eps_exp) {
  const double ln = detail::log_n(n);
  return test == TestFamily::mean ? std::exp(-0.5 * eps_exp * ln) : eps_exp * ln;
}

inline RetentionClass classify_retention(double value, double scale) {
  return value > scale ? RetentionClass::above : RetentionClass::below;
}

struct BoundTerms {
  double a_n = 0.0;
  double b_n = 0.0;
};

inline BoundTerms mean_bound_terms(double n_rare, double n_normal, std::int64_t tau, double gap) {
  if (tau < 1) throw DomainError("tau must be positive");
  const double hr = std::sqrt(gaussian_h(n_rare));
  const double hn = std::sqrt(gaussian_h(n_normal));
  return {hr / hn, hr * (hr - hn + std::sqrt(static_cast<double>(tau)) * gap)};
}

// Gap that yields a given B_n for the given class sizes.
inline double gap_for_b(double b_n, double n_rare, double n_normal, std::int64_t tau) {
  const double hr = std::sqrt(gaussian_h(n_rare));
  const double hn = std::sqrt(gaussian_h(n_normal));
  return (b_n / hr - hr + hn) / std::sqrt(static_cast<double>(tau));
}

// Asymptotic lower bound on the mean-test error as a function of B_n.
inline double mean_error_lower_bound(double b_n) {
  const double c = std::exp(-std::exp(-kGaussianMinLocation));
  const double outer = std::exp(-std::exp(b_n - kGaussianMinLocation));
  double tail = 0.0;  // 1 / (e^B + 1) without overflow
  if (b_n > 0.0) {
    const double e = std::exp(-b_n);
    tail = e / (1.0 + e);
  } else {
    tail = 1.0 / (1.0 + std::exp(b_n));
  }
  return outer * ((1.0 - c) + c * tail);
}

// Theta^(tau/2) = ratio^(tau/2) * n_rare / n_normal.
inline double variance_theta_power(double ratio, std::int64_t tau, double n_rare, double n_normal) {
  if (!(ratio > 0.0)) throw DomainError("variance ratio must be positive");
  if (!(n_rare > 0.0 && n_normal > 0.0)) throw DomainError("class counts must be positive");
  return std::exp(0.5 * static_cast<double>(tau) * std::log(ratio)) * n_rare / n_normal;
}

// Ratio that produces a given Theta^(tau/2).
inline double variance_ratio_for_theta(double theta_power, std::int64_t tau, double n_rare,
                                       double n_normal) {
  if (!(theta_power > 0.0)) throw DomainError("theta power must be positive");
  return std::pow(theta_power * n_normal / n_rare, 2.0 / static_cast<double>(tau));
}

inline double variance_error_from_theta(double theta_power, std::int64_t t_target) {
  if (t_target < 1) throw DomainError("t_target must be positive");
  return -std::expm1(-static_cast<double>(t_target) * std::log1p(1.0 / theta_power));
}

// Realised class counts.
inline double variance_error_closed_form(double ratio, std::int64_t tau, double n_rare,
                                         double n_normal, std::int64_t t_target) {
  return variance_error_from_theta(variance_theta_power(ratio, tau, n_rare, n_normal), t_target);
}

// Expected class counts n * eps and n * (1 - eps).
inline double variance_error_expected(double ratio, std::int64_t tau, std::int64_t n, double epsilon,
                                      std::int64_t t_target) {
  const auto nd = static_cast<double>(n);
  return variance_error_closed_form(ratio, tau, nd * epsilon, nd * (1.0 - epsilon), t_target);
}

// ---- region grids -------------------------------------------------------

struct RegionCell {
  double signal = 0.0;    // r_m or xi_v
  double eps_exp = 0.0;
  double threshold = 0.0;
  bool detectable = false;
  std::optional<double> empirical_error;
};

struct RegionGrid {
  TestFamily test = TestFamily::mean;
  std::vector<double> axis1;  // signal exponents
  std::vector<double> axis2;  // prior exponents
  std::vector<RegionCell> cells;  // row-major: index i1 * |axis2| + i2

  const RegionCell& at(std::size_t i1, std::size_t i2) const { return cells[i1 * axis2.size() + i2]; }
};

struct RegionOverlay {
  std::int64_t trials = 0;
  std::uint64_t master_seed = 0;
  int threads = 0;
};

// `count` evenly spaced points strictly inside (0, 1).
inline std::vector<double> open_unit_axis(std::size_t count) {
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i)
    axis[i] = static_cast<double>(i + 1) / static_cast<double>(count + 1);
  return axis;
}

// Pair realising a signal exponent at size n (mu1 = 0 and a1 = 1 fixed).
inline HypothesisPair pair_for_signal(TestFamily test, double signal, std::int64_t n) {
  if (test == TestFamily::mean) return HypothesisPair::mean(gap_for_exponent(signal, n), 0.0);
  return HypothesisPair::variance(ratio_for_exponent(signal, n), 1.0);
}

inline double threshold_for(TestFamily test, double eps_exp, double budget_s, int k, double alpha) {
  return test == TestFamily::mean ? mean_threshold(eps_exp, budget_s, k, alpha)
                                  : variance_threshold(eps_exp, budget_s, k, alpha);
}

// Classifies every (signal, prior exponent) cell; the base config supplies n,
// t_target, S, K and alpha. With an overlay, each cell also gets a Monte Carlo
// error rate at epsilon = n^(eps_exp - 1).
inline RegionGrid build_region(TestFamily test, const SearchConfig& base, std::vector<double> axis1,
                               std::vector<double> axis2,
                               const std::optional<RegionOverlay>& overlay = std::nullopt) {
  for (double a : axis2)
    if (!(a > 0.0 && a < 1.0)) throw DomainError("prior exponent axis must lie in (0, 1)");
  for (double a : axis1)
    if (!(a > 0.0)) throw DomainError("signal axis must be positive");
  RegionGrid grid;
  grid.test = test;
  grid.axis1 = std::move(axis1);
  grid.axis2 = std::move(axis2);
  grid.cells.reserve(grid.axis1.size() * grid.axis2.size());
  for (double signal : grid.axis1) {
    for (double eps_exp : grid.axis2) {
      RegionCell cell;
      cell.signal = signal;
      cell.eps_exp = eps_exp;
      cell.threshold = threshold_for(test, eps_exp, base.budget_s, base.max_refines, base.alpha);
      cell.detectable = signal > cell.threshold;
      if (overlay) {
        SearchConfig cfg = base;
        cfg.epsilon = epsilon_from_exponent(base.n, eps_exp);
        const Schedule schedule = build_schedule(cfg);
        cell.empirical_error = monte_carlo(cfg, pair_for_signal(test, signal, base.n), schedule,
                                           overlay->trials, overlay->master_seed, overlay->threads)
                                   .error_rate;
      }
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

}  // namespace quicksearch
