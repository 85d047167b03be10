#ifndef PMLAB_PARALLEL_HPP
#define PMLAB_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pmlab {

// Static block partition of [begin, end) over n_threads. Results must be
// written to per-index slots; determinism then does not depend on the
// thread count.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned n_threads, Fn&& fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (n_threads <= 1 || count < 2) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    if (n_threads > count) n_threads = static_cast<unsigned>(count);
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n_threads);
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
        const std::size_t lo = begin + static_cast<std::size_t>(t) * chunk;
        const std::size_t hi = lo + chunk < end ? lo + chunk : end;
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, t, &fn, &errors] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline unsigned default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

}  // namespace pmlab

#endif
