#ifndef SACR_PARALLEL_HPP
#define SACR_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sacr/types.hpp"

namespace sacr {

/// Worker cap: hardware concurrency, bounded by SACR_NUM_THREADS when set.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("SACR_NUM_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < n) n = cap;
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return n;
}

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Work items
/// must be independent; the caller owns any result slots, so the reduction
/// is deterministic regardless of scheduling. The first exception thrown
/// by a worker is rethrown.
template <typename Fn>
void parallel_for(Index n, Fn&& fn) {
    const int workers = std::min<Index>(worker_count(), n) > 0
                            ? static_cast<int>(std::min<Index>(worker_count(), n))
                            : 1;
    if (workers <= 1) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<Index> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&]() {
        for (;;) {
            const Index i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace sacr

#endif
