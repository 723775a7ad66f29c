#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sfwm {

enum class Backend { serial, openmp };

// threads == 0 means "let the runtime decide".
struct ExecPolicy {
    Backend backend = Backend::serial;
    int threads = 0;
};

inline bool openmp_available() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

// Shared-body loop: the same functor runs under both backends so the parallel
// path can be validated against the serial one element for element.
template <typename Body>
void parallel_for(std::int64_t n, const ExecPolicy& policy, const Body& body) {
#ifdef _OPENMP
    if (policy.backend == Backend::openmp) {
        const int nt = policy.threads > 0 ? policy.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
        for (std::int64_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        body(i);
    }
}

}  // namespace sfwm
