#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qfi {

// Number of workers used when jobs == 0 is requested.
inline int hardware_jobs() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Runs fn(i) for i in [0, n). jobs == 1 is the serial reference path used by
// the tests; jobs == 0 means "all available". Every task writes only to its
// own slot, so results are identical for any job count. Exceptions are
// captured and rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, const Fn& fn, int jobs = 0) {
    if (n == 0) return;
#ifdef _OPENMP
    if (jobs != 1 && n > 1) {
        int nthreads = jobs > 0 ? jobs : hardware_jobs();
        std::exception_ptr err;
        std::mutex err_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        return;
    }
#else
    (void)jobs;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace qfi
