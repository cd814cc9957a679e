#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace heightgrowth::parallel {

/// Runs body(chunk) for chunk = 0..chunks-1 on up to `workers` threads.
/// Callers write per-chunk results into their own slots and reduce them in
/// chunk order afterwards, so results never depend on the worker count.
template <class Body>
void for_chunks(std::size_t chunks, int workers, const Body& body) {
    const std::size_t n_threads = std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(1, workers)));
    if (n_threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
            try {
                body(c);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = chunks;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// Half-open index range of chunk c when [0, n) is cut into `chunks` pieces.
inline std::pair<std::size_t, std::size_t> chunk_range(std::size_t n, std::size_t chunks, std::size_t c) {
    return {n * c / chunks, n * (c + 1) / chunks};
}

}  // namespace heightgrowth::parallel
