#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace expbasis {

// Global worker count used by Gram assembly, search restarts and Monte Carlo
// trials. Values < 1 reset to 1.
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, count). Work is split into contiguous blocks so
// each index is always handled exactly once; results written by index are
// therefore independent of the thread count. The exception thrown by the
// lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> failed_at(workers, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = count * w / workers;
            const std::size_t end = count * (w + 1) / workers;
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    failed_at[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    std::size_t first = workers;
    for (std::size_t w = 0; w < workers; ++w) {
        if (errors[w] && (first == workers || failed_at[w] < failed_at[first])) first = w;
    }
    if (first != workers) std::rethrow_exception(errors[first]);
}

}  // namespace expbasis
