#pragma once

// Agility gain (budget saved at equal reliability) and scaling gain
// (threshold reduction at equal budget) of refinement over a plain scan.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "quicksearch/errors.hpp"
#include "quicksearch/policy.hpp"

namespace quicksearch {

struct GainBounds {
  double lower = 0.0;
  double upper = 0.0;
  double asymptotic_k = 0.0;  // limit as K grows
};

inline GainBounds agility_gain_bounds(double s0, double alpha, int k) {
  if (!(s0 > 0.0)) throw DomainError("agility gain requires s0 > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("agility gain requires alpha in (0, 1)");
  if (k < 0) throw DomainError("agility gain requires k >= 0");
  const double ak = std::pow(alpha, k);
  const double denom = s0 * (1.0 - alpha);
  GainBounds g;
  g.lower = 1.0 / (ak + (1.0 - ak * alpha) / denom);
  g.upper = 1.0 / (ak + (1.0 - ak) / denom);
  g.asymptotic_k = s0 * (1.0 - alpha);
  return g;
}

inline GainBounds scaling_gain_bounds(double budget_s, double alpha, int k) {
  if (!(budget_s >= 1.0)) throw DomainError("scaling gain requires budget_s >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("scaling gain requires alpha in (0, 1)");
  if (k < 0) throw DomainError("scaling gain requires k >= 0");
  if (optimal_k(budget_s, 1, alpha) == 0)
    throw DomainError("scaling gain requires alpha <= 1 - 1/budget_s");
  const double ak = std::pow(alpha, k);
  const double denom = budget_s * (1.0 - alpha);
  GainBounds g;
  g.lower = (1.0 + (ak * alpha - 1.0) / denom) / ak;
  g.upper = (1.0 + (ak - 1.0) / denom) / ak;
  g.asymptotic_k = (1.0 - 1.0 / denom) / ak;
  return g;
}

namespace detail {

inline double rounds_after_refines(double budget_s, int k, double alpha) {
  const double inv = std::pow(alpha, -static_cast<double>(k));
  return robust_floor(budget_s * inv + (1.0 - inv) / (1.0 - alpha));
}

}  // namespace detail

// Pre-floor budget at which K refinements leave exactly `rounds` observation rounds.
inline double equalized_budget_continuous(double alpha, int k, double rounds) {
  const double inv = std::pow(alpha, -static_cast<double>(k));
  return (rounds - (1.0 - inv) / (1.0 - alpha)) / inv;
}

// Smallest budget S >= 1 whose s(K) equals floor(s0), found by bisection on
// the floored expression.
inline double equalized_budget(double alpha, int k, double s0) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("equalized_budget requires alpha in (0, 1)");
  if (k < 0) throw DomainError("equalized_budget requires k >= 0");
  const double target = detail::robust_floor(s0);
  if (!(target >= 1.0)) throw InfeasibleSchedule("equalized_budget requires s0 >= 1");
  const auto rounds = [&](double s) { return detail::rounds_after_refines(s, k, alpha); };

  // The pre-floor solution is the infimum whenever it is admissible; the
  // bisection covers the cases where rounding moves it off the step.
  const double continuous = equalized_budget_continuous(alpha, k, target);
  if (continuous >= 1.0 && rounds(continuous) == target) return continuous;

  double lo = 1.0;
  if (rounds(lo) > target)
    throw InfeasibleSchedule("no budget S >= 1 leaves exactly floor(s0) rounds after " +
                             std::to_string(k) + " refinements");
  if (rounds(lo) == target) return lo;
  double hi = std::max(2.0, 2.0 * equalized_budget_continuous(alpha, k, target));
  while (rounds(hi) < target) hi *= 2.0;
  // Invariant: rounds(lo) < target <= rounds(hi).
  while (true) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (rounds(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

// Budget ratio of the plain scan to the equalised refining schedule.
inline double agility_gain(double alpha, int k, double s0) {
  return s0 / equalized_budget(alpha, k, s0);
}

// Threshold ratio (no refinement) / (K refinements) at one budget.
inline double threshold_gain(double budget_s, int k, double alpha) {
  return static_cast<double>(asymptotic_tau(budget_s, k, alpha)) /
         static_cast<double>(asymptotic_tau(budget_s, 0, alpha));
}

}  // namespace quicksearch
