#pragma once

#include <cstdint>

namespace psl {

// SplitMix64 (Steele, Lea, Flood 2014; public domain reference
// implementation at https://prng.di.unimi.it/splitmix64.c).
// Chosen as the project-wide generator because the algorithm is tiny,
// fully specified, and gives bit-identical streams on every platform.
// All randomized operations in the library take an explicit seed and
// draw from one of these, so results are reproducible by construction.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Deterministic sub-seed derivation. Independent random streams inside one
// seeded operation (e.g. the two halves of a concatenated embedding, or the
// split/sampling/init/shuffle stages of one trial) use
// derive_seed(seed, stream) with distinct stream tags.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))).next();
}

}  // namespace psl
