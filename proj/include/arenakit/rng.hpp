#pragma once

#include <cstdint>
#include <initializer_list>

namespace arenakit {

/// Project-wide deterministic PRNG (splitmix64). Fixed here so that
/// determinism tests are portable across platforms and standard
/// library versions.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed = 0) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound). Rejection-free modulo of a 64-bit draw;
  /// the bias is negligible for the small bounds used here.
  uint64_t next_below(uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

  /// Uniform double in [0, 1) with 53 bits of randomness.
  double next_double() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

  /// Uniform double in [lo, hi].
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  uint64_t state_;
};

inline uint64_t hash_mix(uint64_t seed, uint64_t v) {
  SplitMix64 g(seed ^ (v + 0x9E3779B97F4A7C15ULL + (seed << 6) + (seed >> 2)));
  return g.next();
}

/// Combine an arbitrary number of 64-bit values into one seed.
inline uint64_t combine_seed(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x8A5CD789635D2DFFULL;
  for (uint64_t p : parts) h = hash_mix(h, p);
  return h;
}

}  // namespace arenakit
