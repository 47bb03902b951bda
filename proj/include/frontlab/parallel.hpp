#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace frontlab {

// Runs body(i) for i in [0,n) across the given number of worker threads.
// Each index is processed exactly once; callers write results into
// index-addressed slots, so the outcome is identical for any worker count.
inline void parallel_for(std::uint64_t n, int workers,
                         const std::function<void(std::uint64_t)>& body) {
    if (workers <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::uint64_t w = static_cast<std::uint64_t>(workers);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::uint64_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t]() {
            for (std::uint64_t i = t; i < n; i += w) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace frontlab
