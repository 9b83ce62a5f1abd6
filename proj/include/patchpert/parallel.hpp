#pragma once
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace patchpert {

// Thread-count control for the OpenMP kernels. n <= 0 leaves the default.
inline void set_thread_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Parallel loop over [0, n). Iterations must be independent and write to
// disjoint slots, so serial and parallel runs produce bit-identical results.
template <class F>
void parallel_for(std::size_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial reference loop, kept so tests and the benchmark can compare against
// the OpenMP path.
template <class F>
void serial_for(std::size_t n, F&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

} // namespace patchpert
