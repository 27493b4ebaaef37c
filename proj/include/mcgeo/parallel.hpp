#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

#include "mcgeo/common.hpp"

namespace mcgeo {

// Worker cap from MCGEO_THREADS (0 or unset = hardware concurrency).
inline int worker_count() {
  int n = 0;
  if (const char* env = std::getenv("MCGEO_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

// Runs fn(i) for i in [0, n). Iterations must be independent; results written
// to disjoint slots come out identical for any thread count.
template <typename Fn>
void parallel_for(Index n, Fn&& fn) {
  const int workers = static_cast<int>(std::min<Index>(worker_count(), n));
  if (workers <= 1 || n < 4) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mcgeo
