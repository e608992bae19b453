#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "nli/common.hpp"

// Deterministic randomness. Everything in the toolkit draws from SplitMix64:
// a single documented 64-bit generator, so identical seeds reproduce results
// byte-for-byte. Substreams (per frame, per repetition, per purpose string)
// are derived by the hashing helpers below instead of sharing one stream,
// which keeps parallel work order-independent.

namespace nli {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer; also used as a general 64-bit mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Substream key for (base seed, stream index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base + kGolden * (index + 1));
}

/// Position-stable hash for lattice noise: same (seed, x, y) -> same value.
inline std::uint64_t hash_coords(std::uint64_t seed, std::int64_t x, std::int64_t y) {
  std::uint64_t h = mix64(seed + kGolden * static_cast<std::uint64_t>(x));
  return mix64(h ^ (static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4FULL + 1));
}

/// FNV-1a over arbitrary bytes; used for purpose-string sub-seeding and for
/// input file digests in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

/// Sub-seed for a named purpose, e.g. seed_for(seed, "noise").
inline std::uint64_t seed_for(std::uint64_t base, std::string_view purpose) {
  return mix64(base ^ fnv1a64(purpose));
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kGolden);
    return mix64(z);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

  /// Unbiased uniform integer in [0, bound). Lemire's multiply-shift method.
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t t = (0 - bound) % bound;
      while (lo < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller; caches the paired deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Poisson deviate. Sequential inversion for small means, Hormann's PTRS
  /// transformed rejection for the mid range, and a rounded normal
  /// approximation above 1000 where the distributions are indistinguishable.
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) return poisson_inversion(mean);
    if (mean <= 1000.0) return poisson_ptrs(mean);
    const double v = mean + std::sqrt(mean) * normal();
    return v <= 0.0 ? 0 : static_cast<long>(std::llround(v));
  }

 private:
  long poisson_inversion(double mean) {
    const double l = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > l);
    return k - 1;
  }

  long poisson_ptrs(double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform_pos();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          -mean + kf * loglam - std::lgamma(kf + 1.0)) {
        return static_cast<long>(kf);
      }
    }
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nli
