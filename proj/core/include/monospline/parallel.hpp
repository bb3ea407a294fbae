#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace monospline {

/// Run fn(i) for i in [0, count) on up to n_threads workers.
///
/// Work items must be independent and write only to their own slot; results
/// are then identical for any thread count, which keeps seeded runs
/// reproducible whether they execute serially or in parallel.
inline void parallel_for(int count, const std::function<void(int)>& fn, int n_threads = 1) {
    if (count <= 0) return;
    n_threads = std::max(1, std::min(n_threads, count));
    if (n_threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace monospline
