#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rwre {

inline int default_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline int resolve_workers(int workers) {
    return workers > 0 ? workers : default_workers();
}

/// Runs body(i) for i in [0, n). Results must be written to per-index slots;
/// the schedule is unordered, so determinism comes from index-derived seeds.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
#ifdef _OPENMP
    const int w = resolve_workers(workers);
    if (w > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(w)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)workers;
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace rwre
