#pragma once

#include <cstdint>

namespace brickshadows {

// Counter-based generator: output i of stream (seed, stream) is a hash of
// (key(seed, stream) + i * golden_gamma). Any draw can be reproduced from the
// pair of 64-bit identifiers alone, which is what makes measurement records
// replayable without storing gate lists.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(uint64_t seed, uint64_t stream) : key_(mix_key(seed, stream)), counter_(0) {}

  uint64_t next_u64() {
    uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, bound) by rejection.
  uint64_t next_below(uint64_t bound) {
    const uint64_t limit = bound * (UINT64_MAX / bound);
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  int next_bit() { return static_cast<int>(next_u64() >> 63); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [-s, s].
  double next_symmetric(double s) { return s * (2.0 * next_double() - 1.0); }

 private:
  static uint64_t mix_key(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  }

  uint64_t key_;
  uint64_t counter_;
};

}  // namespace brickshadows
