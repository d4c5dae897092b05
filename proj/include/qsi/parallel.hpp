#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace qsi {

/// Worker count: QSI_THREADS when set, otherwise all hardware threads.
inline int worker_count() {
    if (const char* env = std::getenv("QSI_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Applies fn to every item, in parallel over contiguous chunks, and returns
/// the results in input order. Work items must be independent and pure; the
/// output is identical for every worker count, including 1.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, F&& fn)
    -> std::vector<decltype(fn(items[0]))> {
    using R = decltype(fn(items[0]));
    std::vector<R> out(items.size());
    const int workers = std::min<int>(worker_count(), static_cast<int>(items.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t n = items.size();
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) out[i] = fn(items[i]);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace qsi
