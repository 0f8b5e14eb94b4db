#pragma once

#include <cstdint>
#include <cstdlib>
#include <omp.h>

namespace lbdie {

// Worker cap: min(omp_get_max_threads(), LBDIE_THREADS if set and positive).
inline int worker_count() {
  int n = omp_get_max_threads();
  if (const char* s = std::getenv("LBDIE_THREADS")) {
    int cap = std::atoi(s);
    if (cap > 0 && cap < n) n = cap;
  }
  return n;
}

// Parallel loop over [0, n). Each index is written by exactly one worker, so
// results are independent of the thread count.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#pragma omp parallel for schedule(dynamic, 8) num_threads(worker_count())
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Serial twin of parallel_for, kept as the reference lane for tests and the
// kernel benchmark.
template <class F>
void serial_for(std::int64_t n, F&& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace lbdie
