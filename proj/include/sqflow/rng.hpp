#pragma once

#include <cstdint>

namespace sqflow {

/// splitmix64 step; used to stretch user seeds into per-run seeds.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for simulation `index` within a batch started from `base`.
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
  uint64_t s = base + index;
  return splitmix64(s);
}

/// xoshiro-free bounded sampler on top of splitmix64. Self-contained so
/// generated patterns do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() { return splitmix64(state_); }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  uint64_t next_below(uint64_t bound) {
    const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound);
    uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

 private:
  uint64_t state_;
};

}  // namespace sqflow
