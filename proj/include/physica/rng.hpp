#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace physica {

/// Counter-style seeded generator used for every stochastic choice in the
/// pipeline. All derived draws (uniform, normal) are defined in terms of the
/// raw 64-bit stream, so results are bit-identical across runs and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Box-Muller; consumes exactly two raw draws per value.
  double normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Integer in [0, n). n must be > 0. Modulo bias is irrelevant at our n.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Derives an independent stream seed for a named component of the pipeline.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return SplitMix64(master ^ fnv1a64(label)).next();
}

}  // namespace physica
