#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace arti {

/// Runs fn(begin, end) over contiguous chunks of [0, n) on `threads` workers.
/// Chunk boundaries depend only on (n, threads), and callers only write to
/// disjoint slots, so results never depend on scheduling.
template <typename Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const int t = std::max(1, threads);
    if (t == 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(t, n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

/// Element-wise convenience over parallel_chunks.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    parallel_chunks(n, threads, [&fn](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

} // namespace arti
