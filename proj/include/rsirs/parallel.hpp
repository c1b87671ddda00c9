#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsirs::par {

/// Execution policy for the data-parallel kernels. Every kernel has a plain
/// serial loop and an OpenMP loop over independent output slots, so both
/// policies produce bitwise-identical results.
enum class Exec { Serial, OpenMP };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// fn(i) for i in [0, n). Work items must be independent and write only to
/// their own slot. Static schedule; used for regular kernels (matvec rows,
/// cone blocks).
template <typename F>
void for_each(std::size_t n, Exec exec, F&& fn) {
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

/// Dynamic-schedule variant for irregular work items (Monte Carlo drops,
/// candidate screening). Same independence contract as for_each.
template <typename F>
void for_each_dynamic(std::size_t n, Exec exec, F&& fn) {
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace rsirs::par
