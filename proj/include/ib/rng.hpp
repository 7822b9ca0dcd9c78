#pragma once

#include <cstdint>
#include <random>

#include "ib/types.hpp"

namespace ib {

/// splitmix64 mix; used to derive independent per-restart / per-path seeds
/// from a base seed and a counter without sharing RNG state.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0,1) drawn directly from the generator output, so the
/// stream does not depend on library distribution internals.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Row sampled from a symmetric Dirichlet(1.0): i.i.d. Exp(1) normalized.
inline Vector dirichlet_row(std::mt19937_64& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = -std::log(1.0 - uniform01(rng));
  }
  return v / v.sum();
}

}  // namespace ib
