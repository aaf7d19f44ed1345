#pragma once

#include <cstdint>
#include <random>

#include "iim/geometry.hpp"

namespace iim {

/// Uniform double in [0,1) from the top 53 bits of the generator output.
/// Used instead of std::uniform_real_distribution so that draws are
/// reproducible across standard libraries.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

template <int D>
Vec<D> uniform_in(std::mt19937_64& g, const Box<D>& box) {
  Vec<D> x;
  for (int i = 0; i < D; ++i) x[i] = uniform(g, box.lo[i], box.hi[i]);
  return x;
}

/// Derives an independent stream for a named suite section.
inline std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
}

}  // namespace iim
