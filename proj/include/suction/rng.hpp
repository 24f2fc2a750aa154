// Deterministic random streams (splitmix64 core, Box-Muller gaussians).
// Stream derivation keeps per-scene results independent of scheduling order.
#pragma once

#include <cstdint>
#include <cmath>

#include "suction/core.hpp"

namespace suction {

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Hash-combine for deriving independent seeds, e.g. (seed, cycle, scene).
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  return mix64(a ^ (0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2) + mix64(b)));
}
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n) { return n == 0 ? 0 : next() % n; }

  // Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int64_t>(uniform_index(static_cast<uint64_t>(hi - lo + 1)));
  }

  // Standard normal via Box-Muller; caches the second draw.
  double gaussian() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    cache_ = r * std::sin(a);
    has_cache_ = true;
    return r * std::cos(a);
  }

  Rng derive(uint64_t stream) const { return Rng(mix_seed(state_, stream)); }

 private:
  uint64_t state_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

}  // namespace suction
