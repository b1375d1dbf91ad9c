#pragma once

#include <cstdint>
#include <random>

namespace cdhrl {

// All stochastic components draw from this engine; the helpers below avoid the
// implementation-defined std::*_distribution algorithms so that a seed yields
// the same run regardless of standard library.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_int(Rng& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline std::uint64_t next_seed(Rng& rng) { return rng(); }

}  // namespace cdhrl
