#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlpt {

/// Worker count for sampled checks. Defaults to the available cores.
unsigned thread_count() noexcept;
void set_thread_count(unsigned n) noexcept;

/// Runs fn(block) for block in [0, nblocks). Blocks are claimed dynamically, so callers
/// keep results per block and merge by index to stay deterministic.
template <class Fn>
void parallel_blocks(std::size_t nblocks, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(thread_count(), nblocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(nblocks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace nlpt
