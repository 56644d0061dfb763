#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ferglab {

/// Worker budget: the explicit request (0 = all cores), capped by the
/// FERGLAB_THREADS environment variable and the hardware concurrency.
inline std::size_t thread_budget(std::size_t requested = 0) {
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t n = requested == 0 ? hw : requested;
    if (const char* env = std::getenv("FERGLAB_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<std::size_t>(cap) < n) n = static_cast<std::size_t>(cap);
    }
    return std::max<std::size_t>(1, std::min(n, hw));
}

/// Static block partition of [0, n). Callers must write results by index so
/// the outcome does not depend on the worker count. The first exception
/// raised by any worker is rethrown on the calling thread.
template <typename Fn>
inline void parallel_for(std::size_t n, std::size_t n_threads, Fn&& fn) {
    if (n_threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    n_threads = std::min(n_threads, n);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t lo = n * t / n_threads, hi = n * (t + 1) / n_threads;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ferglab
