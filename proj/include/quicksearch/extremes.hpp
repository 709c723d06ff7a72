#pragma once

// Order statistics and extreme-value limits. Normalisations follow the
// convention W = shift + scale * Y, with Y the raw order statistic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "quicksearch/errors.hpp"
#include "quicksearch/model.hpp"
#include "quicksearch/rng.hpp"

namespace quicksearch {

struct AffineNorm {
  double shift = 0.0;
  double scale = 1.0;
  std::int64_t m = 1;

  double apply(double y) const { return shift + scale * y; }
};

enum class LimitKind { min_von_mises, max_von_mises };

struct LimitLaw {
  LimitKind kind = LimitKind::min_von_mises;
  double kappa = 0.0;
  double lambda = 0.0;
  double sigma = 1.0;
};

struct NormalApprox {
  double mean = 0.0;
  double variance = 0.0;
};

// ln(2 sqrt(pi)), the location of the Gaussian minimum limit.
inline const double kGaussianMinLocation = std::log(2.0 * std::sqrt(std::numbers::pi));

// P(Y_{r:m} <= y) given p = G(y).
inline double order_cdf_from_prob(double p, std::int64_t r, std::int64_t m) {
  if (m < 1 || r < 1 || r > m) throw DomainError("order statistic rank must satisfy 1 <= r <= m");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("parent cdf value must lie in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(r), static_cast<double>(m - r + 1), p);
}

template <class Cdf>
double exact_order_cdf(Cdf&& parent_cdf, std::int64_t r, std::int64_t m, double y) {
  return order_cdf_from_prob(parent_cdf(y), r, m);
}

// h(x) = 2 ln x - ln ln x.
inline double gaussian_h(double x) {
  if (!(x >= 3.0)) throw DomainError("h(x) requires x >= 3");
  return 2.0 * std::log(x) - std::log(std::log(x));
}

inline AffineNorm gaussian_min_norm(std::int64_t m) {
  if (m < 3) throw DomainError("gaussian_min_norm requires m >= 3");
  const double h = gaussian_h(static_cast<double>(m));
  return {h, std::sqrt(h), m};
}

inline double gaussian_min_limit_cdf(double w) {
  return -std::expm1(-std::exp(w - kGaussianMinLocation));
}

inline AffineNorm chi2_min_norm(int k, std::int64_t m) {
  if (k < 1) throw DomainError("chi2_min_norm requires k >= 1");
  if (m < 2) throw DomainError("chi2_min_norm requires m >= 2");
  const double half_k = 0.5 * k;
  const double log_ratio = std::log(static_cast<double>(m)) - std::lgamma(half_k + 1.0);
  return {0.0, 0.5 * std::exp(log_ratio / half_k), m};
}

inline double chi2_min_limit_cdf(int k, double w) {
  if (k < 1) throw DomainError("chi2_min_limit_cdf requires k >= 1");
  if (!(w >= 0.0)) throw DomainError("chi2_min_limit_cdf requires w >= 0");
  return -std::expm1(-std::pow(w, 0.5 * k));
}

// Shift -(ln m + (k/2 - 1) ln ln m), scale 1/2.
inline AffineNorm chi2_max_norm(int k, std::int64_t m) {
  if (k < 1) throw DomainError("chi2_max_norm requires k >= 1");
  if (m < 3) throw DomainError("chi2_max_norm requires m >= 3");
  const double lm = std::log(static_cast<double>(m));
  return {-(lm + (0.5 * k - 1.0) * std::log(lm)), 0.5, m};
}

inline double chi2_max_limit_cdf(int k, double w) {
  if (k < 1) throw DomainError("chi2_max_limit_cdf requires k >= 1");
  return std::exp(-std::exp(-w - std::lgamma(0.5 * k)));
}

// Limit cdf of the r-th smallest, from the value of the minimum's limit cdf.
// Equals the regularised lower incomplete gamma P(r, -ln(1 - L)).
inline double low_order_from_min(double min_cdf, std::int64_t r) {
  if (r < 1) throw DomainError("low_order_limit_cdf requires r >= 1");
  if (!(min_cdf >= 0.0 && min_cdf <= 1.0)) throw DomainError("limit cdf value must lie in [0, 1]");
  if (min_cdf >= 1.0) return 1.0;
  if (min_cdf == 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(r), -std::log1p(-min_cdf));
}

template <class LimitMin>
double low_order_limit_cdf(LimitMin&& limit_min, std::int64_t r, double w) {
  return low_order_from_min(limit_min(w), r);
}

// Asymptotic law of the ceil(m zeta)-th order statistic.
template <class Quantile, class Pdf>
NormalApprox central_order_normal(Quantile&& parent_quantile, Pdf&& parent_pdf, double zeta,
                                  std::int64_t m) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("central_order_normal requires zeta in (0, 1)");
  if (m < 1) throw DomainError("central_order_normal requires m >= 1");
  const double q = parent_quantile(zeta);
  const double g = parent_pdf(q);
  if (!(g > 0.0) || !std::isfinite(g))
    throw DomainError("central_order_normal requires positive density at the quantile");
  return {q, zeta * (1.0 - zeta) / (static_cast<double>(m) * g * g)};
}

// Distribution of the fraction-quantile of the t-round statistic across
// `count` streams of one class (rare uses mu1, normal uses mu0).
inline NormalApprox refinement_central_predictors(const HypothesisPair& pair, std::int64_t t,
                                                  double fraction, std::int64_t count,
                                                  bool rare_class) {
  if (!pair.is_mean()) throw DomainError("central predictors exist only for the mean test");
  if (t < 1) throw DomainError("central predictors require t >= 1");
  if (count < 2) throw DomainError("central predictors require count >= 2");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw DomainError("central predictors require fraction in (0, 1)");
  const double mu = rare_class ? pair.mean_test().mu1 : pair.mean_test().mu0;
  const auto td = static_cast<double>(t);
  const boost::math::normal_distribution<double> parent(mu * td, std::sqrt(td));
  NormalApprox out = central_order_normal(
      [&](double z) { return boost::math::quantile(parent, z); },
      [&](double y) { return boost::math::pdf(parent, y); }, fraction, count);
  out.mean = mu * td + std::sqrt(2.0 * td) * boost::math::erf_inv(2.0 * fraction - 1.0);
  return out;
}

inline double von_mises_cdf(const LimitLaw& law, double w) {
  if (!(law.sigma > 0.0)) throw DomainError("limit law scale must be positive");
  const double z = (w - law.lambda) / law.sigma;
  const double kappa = law.kappa;
  const bool gumbel = std::fabs(kappa) < 1e-8;
  if (law.kind == LimitKind::min_von_mises) {
    if (gumbel) return -std::expm1(-std::exp(z));
    if (1.0 + kappa * z <= 0.0) return kappa > 0.0 ? 0.0 : 1.0;
    return -std::expm1(-std::exp(std::log1p(kappa * z) / kappa));
  }
  if (gumbel) return std::exp(-std::exp(-z));
  if (1.0 - kappa * z <= 0.0) return kappa > 0.0 ? 1.0 : 0.0;
  return std::exp(-std::exp(std::log1p(-kappa * z) / kappa));
}

// Kolmogorov-Smirnov distance between the empirical cdf of `samples` and `cdf`.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw DomainError("ks_distance requires samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

enum class ExtremeFamily { gaussian_min, chi2_min, chi2_max };

// Normalised r-th smallest (largest for chi2_max) of m parent draws, one per
// replicate. Draws go through the order statistic's own law: with U uniform,
// the Beta(r, m - r + 1) quantile of U is the parent-cdf value of Y_{r:m}.
inline std::vector<double> simulate_normalised_extremes(ExtremeFamily family, int k, std::int64_t m,
                                                        std::int64_t r, std::int64_t replicates,
                                                        std::uint64_t seed) {
  if (replicates < 1) throw DomainError("replicates must be positive");
  if (r < 1 || r > m) throw DomainError("order statistic rank must satisfy 1 <= r <= m");
  const CounterRng rng(seed);
  const auto rd = static_cast<double>(r);
  const auto tail = static_cast<double>(m - r + 1);
  std::vector<double> out(static_cast<std::size_t>(replicates));
  switch (family) {
    case ExtremeFamily::gaussian_min: {
      const AffineNorm a = gaussian_min_norm(m);
      const boost::math::normal_distribution<double> parent;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = rng.uniform(i, 0, RngDomain::scan);
        const double p = r == 1 ? -std::expm1(std::log1p(-u) / static_cast<double>(m))
                                : boost::math::ibeta_inv(rd, tail, u);
        out[i] = a.apply(boost::math::quantile(parent, p));
      }
      break;
    }
    case ExtremeFamily::chi2_min: {
      const AffineNorm a = chi2_min_norm(k, m);
      const boost::math::chi_squared_distribution<double> parent(k);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = rng.uniform(i, 0, RngDomain::scan);
        const double p = r == 1 ? -std::expm1(std::log1p(-u) / static_cast<double>(m))
                                : boost::math::ibeta_inv(rd, tail, u);
        out[i] = a.apply(boost::math::quantile(parent, p));
      }
      break;
    }
    case ExtremeFamily::chi2_max: {
      if (r != 1) throw DomainError("chi2_max covers the sample maximum only (r = 1)");
      const AffineNorm a = chi2_max_norm(k, m);
      const boost::math::chi_squared_distribution<double> parent(k);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = rng.uniform(i, 0, RngDomain::scan);
        const double q = -std::expm1(std::log1p(-u) / static_cast<double>(m));  // 1 - G(max)
        out[i] = a.apply(boost::math::quantile(boost::math::complement(parent, q)));
      }
      break;
    }
  }
  return out;
}

// Limit cdf matching simulate_normalised_extremes.
inline double normalised_extreme_limit(ExtremeFamily family, int k, std::int64_t r, double w) {
  switch (family) {
    case ExtremeFamily::gaussian_min:
      return low_order_from_min(gaussian_min_limit_cdf(w), r);
    case ExtremeFamily::chi2_min:
      return w <= 0.0 ? 0.0 : low_order_from_min(chi2_min_limit_cdf(k, w), r);
    case ExtremeFamily::chi2_max:
      return chi2_max_limit_cdf(k, w);
  }
  return 0.0;
}

}  // namespace quicksearch
