#pragma once

#include <cstdint>

namespace mcgeo {

// SplitMix64: counter-based 64-bit generator (Steele/Lea/Flood 2014).
// The state advances by a fixed odd increment and each output is a bijective
// hash of the counter, so a (seed, draw-index) pair determines every draw.
// All stochastic routines in this library consume one stream of these draws
// in a documented order, which makes runs bit-reproducible for a given seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Multiply-shift mapping (Lemire); consumes
  // exactly one draw, so the stream position is branch-independent.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace mcgeo
