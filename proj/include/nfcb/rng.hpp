// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_RNG_HPP
#define NFCB_RNG_HPP

#include <cstdint>

namespace nfcb {

// Counter-based generator: the stream for draw k of sample i depends only on
// (seed, i, k), so Monte-Carlo loops give identical results for any worker
// count or schedule. splitmix64 finalizer over a golden-ratio walk.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream + 0xBF58476D1CE4E5B9ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; never returns exactly zero.
  double next_unit_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound > 0. Modulo bias is < 2^-40 for the
  // bounds used here (all far below 2^24).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

}  // namespace nfcb

#endif  // NFCB_RNG_HPP
