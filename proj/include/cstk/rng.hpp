// cstk/rng.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cstk/common.hpp"

namespace cstk {

// Deterministic random source.  Distributions are hand-rolled on top of
// mt19937_64 so that draws are identical across standard library
// implementations, not just across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_mix_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi] inclusive, via rejection sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw UsageError("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());  // full range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Standard normal via Box-Muller; caches the second draw.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derives an independent stream, e.g. one per label prototype.
  Rng fork(std::uint64_t salt) const {
    // SplitMix64 over (seed ^ salt) decorrelates nearby salts.
    std::uint64_t z = seed_mix_ ^ (salt + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_mix_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cstk
