#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ibd {

// Default worker count: IBDTORUS_THREADS if set, else hardware concurrency.
inline int default_threads() {
    if (const char* env = std::getenv("IBDTORUS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Run fn(begin, end) over a partition of [0, n).  Results must be written to
// disjoint, preallocated slots so the outcome is independent of the
// partition; reductions are then performed serially in index order by the
// caller, which keeps every sum bit-stable across thread counts.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (threads <= 0) threads = default_threads();
    if (threads == 1 || n < 2) {
        fn(0, n);
        return;
    }
    const std::int64_t nt = std::min<std::int64_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    const std::int64_t chunk = (n + nt - 1) / nt;
    for (std::int64_t t = 0; t < nt; ++t) {
        const std::int64_t b = t * chunk;
        const std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

} // namespace ibd
