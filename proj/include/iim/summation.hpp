#pragma once

#include <cstddef>
#include <span>

namespace iim {

/// Pairwise (cascade) summation. The reduction tree is a function of the
/// length only, so results are identical for any worker count.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 32) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

}  // namespace iim
