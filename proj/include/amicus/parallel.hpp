#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace amicus {

// Global worker count for parallel kernels. 0 or negative resets to the
// hardware default. Thread-safe to read; set it once at startup.
int max_threads();
void set_max_threads(int n);

// Data-parallel loop. f(i) must touch only state owned by index i, so the
// result is identical for any thread count; reductions over the per-index
// results are done by the caller in fixed order.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
#ifdef _OPENMP
  const int nt = max_threads();
  if (nt > 1 && n > 1) {
    std::exception_ptr err;
    #pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        f(static_cast<std::size_t>(i));
      } catch (...) {
        #pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace amicus
