#pragma once

#include <cstdint>
#include <string_view>

#include "driftkit/hash.hpp"

namespace driftkit {

// splitmix64 generator. Small state, good mixing, and fully portable output,
// which keeps emulation and training shuffles byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream for (seed, label). Parallel per-UE generation relies
  // on each UE owning one of these.
  static Rng derive(std::uint64_t seed, std::string_view label) {
    return Rng(finalize(seed ^ fnv1a64(label)));
  }
  static Rng derive(std::uint64_t seed, std::uint64_t salt) {
    return Rng(finalize(seed ^ fnv1a64(salt)));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace driftkit
