#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace atomslit::detail {

// Static range partitioning across threads. Chunks are fixed by (n, workers)
// only, and each index writes its own slot, so outputs never depend on
// scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t t = workers > 0 ? static_cast<std::size_t>(workers)
                                : (hw > 0 ? hw : 1);
    if (t > n) t = n > 0 ? n : 1;
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    const std::size_t chunk = (n + t - 1) / t;
    for (std::size_t w = 0; w < t; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace atomslit::detail
