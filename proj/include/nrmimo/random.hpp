/**
 * @file random.hpp
 * @brief Explicit, portable random streams.
 *
 * Distributions are written out here instead of using <random>'s
 * distribution classes, whose output is implementation defined. The engine
 * (mt19937_64) is fully specified by the standard, so a (seed, stream) pair
 * gives the same draws with any conforming toolchain.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace nrmimo {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Random {
 public:
  explicit Random(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL))) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (cosine branch only, no cached pair).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sigma) noexcept { return mean + sigma * normal(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Named sub-streams of one run seed.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kLosState = 2,
  kDecode = 3,
  kTest = 99,
};

inline Random makeStream(std::uint64_t seed, Stream s, std::uint64_t sub = 0) {
  return Random(seed, static_cast<std::uint64_t>(s) * 1000003ULL + sub);
}

}  // namespace nrmimo
