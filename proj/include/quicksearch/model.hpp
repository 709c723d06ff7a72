#pragma once

// Gaussian test families: per-sample statistics, likelihood ratios and
// posteriors. Normal streams follow F0, rare streams follow F1, and the
// likelihood ratio is always f0/f1, so small ratios point at rare streams.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>

#include "quicksearch/errors.hpp"

namespace quicksearch {

// N(mu0, 1) for normal streams against N(mu1, 1) for rare ones.
struct MeanTest {
  double mu0 = 0.0;
  double mu1 = 0.0;
};

// N(0, a0) for normal streams against N(0, a1) for rare ones.
struct VarianceTest {
  double a0 = 1.0;
  double a1 = 1.0;
};

enum class TestFamily { mean, variance };

inline const char* to_string(TestFamily f) { return f == TestFamily::mean ? "mean" : "variance"; }

class HypothesisPair {
 public:
  static HypothesisPair mean(double mu0, double mu1) {
    if (!(mu0 > mu1) || !std::isfinite(mu0) || !std::isfinite(mu1))
      throw ConfigError("mean test requires finite mu0 > mu1");
    return HypothesisPair(MeanTest{mu0, mu1});
  }

  static HypothesisPair variance(double a0, double a1) {
    if (!(a1 > 0.0) || !(a0 > a1) || !std::isfinite(a0))
      throw ConfigError("variance test requires a0 > a1 > 0");
    return HypothesisPair(VarianceTest{a0, a1});
  }

  TestFamily family() const {
    return std::holds_alternative<MeanTest>(test_) ? TestFamily::mean : TestFamily::variance;
  }
  bool is_mean() const { return family() == TestFamily::mean; }

  const MeanTest& mean_test() const { return std::get<MeanTest>(test_); }
  const VarianceTest& variance_test() const { return std::get<VarianceTest>(test_); }

  template <class Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), test_);
  }

 private:
  explicit HypothesisPair(std::variant<MeanTest, VarianceTest> t) : test_(t) {}

  std::variant<MeanTest, VarianceTest> test_;
};

// Cumulative Z_t (sum of samples, mean test) or sum of squares (variance test).
struct SufficientStat {
  double value = 0.0;
  std::int64_t count = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Maps a standard normal draw to a sample of the stream's class.
inline double sample_increment(const HypothesisPair& pair, bool is_rare, double draw) {
  return pair.visit(Overloaded{
      [&](const MeanTest& m) { return (is_rare ? m.mu1 : m.mu0) + draw; },
      [&](const VarianceTest& v) { return std::sqrt(is_rare ? v.a1 : v.a0) * draw; },
  });
}

// sample_increment and llr_increment with the per-pair constants hoisted out;
// results are identical to the plain functions.
struct SampleMap {
  double shift[2] = {0.0, 0.0};  // indexed by is_rare
  double scale[2] = {1.0, 1.0};

  double operator()(bool is_rare, double draw) const { return shift[is_rare] + scale[is_rare] * draw; }
};

inline SampleMap sample_map(const HypothesisPair& pair) {
  return pair.visit(Overloaded{
      [](const MeanTest& m) { return SampleMap{{m.mu0, m.mu1}, {1.0, 1.0}}; },
      [](const VarianceTest& v) { return SampleMap{{0.0, 0.0}, {std::sqrt(v.a0), std::sqrt(v.a1)}}; },
  });
}

struct LlrMap {
  bool quadratic = false;
  double slope = 0.0;
  double offset = 0.0;

  double operator()(double sample) const {
    return quadratic ? slope * sample * sample + offset : slope * sample + offset;
  }
};

inline LlrMap llr_map(const HypothesisPair& pair) {
  return pair.visit(Overloaded{
      [](const MeanTest& m) { return LlrMap{false, m.mu0 - m.mu1, 0.5 * (m.mu1 * m.mu1 - m.mu0 * m.mu0)}; },
      [](const VarianceTest& v) {
        return LlrMap{true, 0.5 * (1.0 / v.a1 - 1.0 / v.a0), 0.5 * std::log(v.a1 / v.a0)};
      },
  });
}

// Contribution of one sample to the sufficient statistic.
inline double statistic_increment(const HypothesisPair& pair, double sample) {
  return pair.is_mean() ? sample : sample * sample;
}

inline void accumulate(const HypothesisPair& pair, SufficientStat& stat, double sample) {
  stat.value += statistic_increment(pair, sample);
  ++stat.count;
}

// ln f0(x)/f1(x) for a single sample.
inline double llr_increment(const HypothesisPair& pair, double sample) {
  return pair.visit(Overloaded{
      [&](const MeanTest& m) {
        return (m.mu0 - m.mu1) * sample + 0.5 * (m.mu1 * m.mu1 - m.mu0 * m.mu0);
      },
      [&](const VarianceTest& v) {
        return 0.5 * (1.0 / v.a1 - 1.0 / v.a0) * sample * sample + 0.5 * std::log(v.a1 / v.a0);
      },
  });
}

// ln of the likelihood ratio after stat.count samples. The variance branch keeps
// the (a1/a0)^(t/2) normalisation so the result is the true density ratio.
inline double log_likelihood_ratio(const HypothesisPair& pair, const SufficientStat& stat) {
  if (stat.count == 0) return 0.0;
  const auto t = static_cast<double>(stat.count);
  return pair.visit(Overloaded{
      [&](const MeanTest& m) {
        return (m.mu0 - m.mu1) * stat.value + t * 0.5 * (m.mu1 * m.mu1 - m.mu0 * m.mu0);
      },
      [&](const VarianceTest& v) {
        return 0.5 * (1.0 / v.a1 - 1.0 / v.a0) * stat.value + 0.5 * t * std::log(v.a1 / v.a0);
      },
  });
}

// [1 + (1-eps)/eps * exp(llr)]^-1, evaluated as a logistic in log space.
inline double posterior_from_llr(double llr, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("posterior requires 0 < epsilon < 1");
  const double a = std::log1p(-epsilon) - std::log(epsilon) + llr;
  if (a > 0.0) {
    const double e = std::exp(-a);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(a));
}

inline double posterior_rare(const HypothesisPair& pair, const SufficientStat& stat,
                             double epsilon) {
  return posterior_from_llr(log_likelihood_ratio(pair, stat), epsilon);
}

// The likelihood ratio is increasing in the raw statistic for both families,
// so ranking by the statistic ranks by the ratio.
inline double ordering_statistic(const SufficientStat& stat) { return stat.value; }

// KL(f1 || f0): mean drift of ln(f1/f0) on a rare stream.
inline double kl_rare_vs_normal(const HypothesisPair& pair) {
  return pair.visit(Overloaded{
      [](const MeanTest& m) { return 0.5 * (m.mu0 - m.mu1) * (m.mu0 - m.mu1); },
      [](const VarianceTest& v) {
        const double q = v.a1 / v.a0;
        return 0.5 * (q - 1.0 - std::log(q));
      },
  });
}

// KL(f0 || f1): mean drift of ln(f0/f1) on a normal stream.
inline double kl_normal_vs_rare(const HypothesisPair& pair) {
  return pair.visit(Overloaded{
      [](const MeanTest& m) { return 0.5 * (m.mu0 - m.mu1) * (m.mu0 - m.mu1); },
      [](const VarianceTest& v) {
        const double q = v.a0 / v.a1;
        return 0.5 * (q - 1.0 - std::log(q));
      },
  });
}

}  // namespace quicksearch
