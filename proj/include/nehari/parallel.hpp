#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace nehari {

inline unsigned default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

// Runs fn(i) for i in [0, count). Exceptions are captured per index and the
// lowest-index one is rethrown after all threads join, matching what the
// serial loop would have thrown first.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    unsigned w = workers == 0 ? default_workers() : workers;
    if (w > count) w = static_cast<unsigned>(count);
    if (w <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Pairwise summation in a fixed order, so sums of concurrently produced
// terms stay bit-identical across worker counts.
inline double pairwise_sum(std::vector<double> terms) {
    std::size_t n = terms.size();
    if (n == 0) return 0.0;
    while (n > 1) {
        std::size_t m = 0;
        for (std::size_t i = 0; i + 1 < n; i += 2) terms[m++] = terms[i] + terms[i + 1];
        if (n % 2) terms[m++] = terms[n - 1];
        n = m;
    }
    return terms[0];
}

} // namespace nehari
