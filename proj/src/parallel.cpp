#include "affine/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace affine {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads) {
#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        body(static_cast<std::size_t>(i));
    }
#else
    (void)threads;
    serial_for(n, body);
#endif
}

void serial_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace affine
