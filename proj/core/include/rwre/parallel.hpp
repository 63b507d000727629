#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rwre {

/// Calls f(i) for i in [0, n) on up to `workers` threads. Each index is handled exactly once,
/// so results written to slot i are independent of the worker count.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        const std::size_t used = std::min(threads, n);
        for (std::size_t t = 0; t < used; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n; i += used) f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace rwre
