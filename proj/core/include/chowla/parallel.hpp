#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chowla {

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
///
/// Work items are claimed dynamically, so callers that need reproducible
/// output must write into per-item slots and reduce them afterwards in index
/// order. The first exception thrown by any item is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    threads = std::max(1u, threads);
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace chowla
