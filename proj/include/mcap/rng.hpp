#pragma once

#include <cstdint>
#include <random>

// Deterministic randomness helpers. Everything downstream (scenario draws,
// rounding trials, random profiles) must reproduce bit-exactly across
// platforms, so doubles are always built from raw 64-bit draws instead of
// std::uniform_real_distribution, whose output is implementation-defined.

namespace mcap {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combine; used to derive child seeds from (seed, tag, i, ...).
inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + b + (a << 6) + (a >> 2)));
}

// Canonical double in [0, 1) from the top 53 bits.
inline double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Thin stateful stream over mt19937_64 (the engine's sequence is pinned by
// the standard, so streams are portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  double u01() { return u01_from_bits(bits()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Unbiased integer in [0, n) via rejection.
  std::size_t index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = bits();
    while (x >= limit) x = bits();
    return static_cast<std::size_t>(x % n);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mcap
