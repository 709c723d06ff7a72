#pragma once

// Counter-based random numbers. Every variate is a pure function of
// (seed, stream, counter, domain), so results never depend on call order
// or on how trials are spread across threads.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace quicksearch {

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of trial `index` under `master`. Injective in `index` for a fixed master.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + index);
}

enum class RngDomain : std::uint64_t {
  label = 0x4c4142454cULL,
  sample = 0x53414d504c45ULL,
  scan = 0x5343414eULL,
};

class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed) noexcept
      : seed_(seed),
        label_key_(key(seed, RngDomain::label)),
        sample_key_(key(seed, RngDomain::sample)),
        scan_key_(key(seed, RngDomain::scan)) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter,
                               RngDomain domain = RngDomain::sample) const noexcept {
    const std::uint64_t k = domain == RngDomain::sample ? sample_key_
                            : domain == RngDomain::scan ? scan_key_
                                                        : label_key_;
    return mix64(mix64(k + stream) + counter);
  }

  // Uniform on [0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter,
                 RngDomain domain = RngDomain::sample) const noexcept {
    return to_unit(bits(stream, counter, domain));
  }

  // Standard normal via Box-Muller on two hashed uniforms.
  double normal(std::uint64_t stream, std::uint64_t counter,
                RngDomain domain = RngDomain::sample) const noexcept {
    const std::uint64_t h = bits(stream, counter, domain);
    const double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = to_unit(mix64(h ^ 0x6a09e667f3bcc909ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t key(std::uint64_t seed, RngDomain domain) noexcept {
    return mix64(seed ^ static_cast<std::uint64_t>(domain));
  }

  static double to_unit(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed_;
  std::uint64_t label_key_;
  std::uint64_t sample_key_;
  std::uint64_t scan_key_;
};

}  // namespace quicksearch
