#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace arqshare {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// SplitMix64 stream keyed by (seed, stream index). Every Monte Carlo trial
/// owns one stream, so outcomes do not depend on scheduling or thread count.
class TrialRng {
 public:
  using result_type = std::uint64_t;

  TrialRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) ^ (stream * 0x9E3779B97F4A7C15ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Two independent standard normals (Box-Muller).
  void normal_pair(double& x, double& y) {
    const double u = 1.0 - uniform();  // (0, 1]
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double t = 2.0 * std::numbers::pi * v;
    x = r * std::cos(t);
    y = r * std::sin(t);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent seed for a sub-experiment.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return mix64(seed ^ mix64(salt + 0x3C6EF372FE94F82BULL));
}

}  // namespace arqshare
