#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "digeo/config.hpp"

namespace digeo {

// Runs f(0..n-1). The parallel path distributes iterations over OpenMP
// threads; every iteration writes only to its own slot, so serial and
// parallel runs produce identical data.
template <class F>
void for_each_index(std::size_t n, F&& f, bool parallel = parallel_enabled()) {
#ifdef _OPENMP
  if (parallel && n > 1) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      f(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace digeo
