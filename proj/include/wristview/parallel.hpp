#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wristview {

// Runs fn(i) for i in [0, n) on up to `threads` threads. Work is split into
// contiguous index chunks, so with results written by index the output is
// identical at any thread count. The first exception thrown by a worker is
// rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const std::size_t nthreads =
        threads <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace wristview
