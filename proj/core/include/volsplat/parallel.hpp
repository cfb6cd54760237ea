// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace volsplat {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(thread_index, begin, end) over contiguous chunks of [0, n).
// threads == 1 runs inline on the calling thread. Chunk boundaries depend
// only on (n, threads), so any reduction that merges per-thread buffers in
// thread-index order is deterministic for a fixed thread count.
inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (nt <= 1) {
        fn(0, 0, n);
        return;
    }
    std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        std::size_t b = t * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, t, b, e] { fn(static_cast<int>(t), b, e); });
    }
    for (auto& th : pool) th.join();
}

} // namespace volsplat
