#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace iim {

/// Worker count: hardware concurrency, capped by the IIM_THREADS
/// environment variable when set.
inline int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int n = static_cast<int>(hw);
  if (const char* s = std::getenv("IIM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && v >= 1) n = std::min<long>(v, 256);
  }
  return std::max(n, 1);
}

/// Runs f(i) for i in [0, n). Each index writes only its own output slot,
/// so results do not depend on the schedule or the worker count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const int workers = worker_count();
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t chunk = (n + nw - 1) / nw;
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n, b + chunk);
      try {
        for (std::size_t i = b; i < e; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace iim
