#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace eqc {

// Worker count: the THREADS environment variable when set to a positive
// integer, otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t default_worker_count();

/// Splits [0, total) into fixed-size chunks and evaluates fn(begin, end) for
/// each chunk on up to `workers` threads. Results come back indexed by chunk,
/// so a sequential fold over them is independent of the worker count.
template <class Fn>
auto map_chunks(std::size_t total, std::size_t chunk_size, std::size_t workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}))> {
    using Partial = decltype(fn(std::size_t{}, std::size_t{}));
    chunk_size = std::max<std::size_t>(chunk_size, 1);
    const std::size_t chunks = (total + chunk_size - 1) / chunk_size;
    std::vector<Partial> results(chunks);
    if (chunks == 0) return results;
    workers = std::clamp<std::size_t>(workers, 1, chunks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto drain = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            const std::size_t begin = c * chunk_size;
            const std::size_t end = std::min(total, begin + chunk_size);
            try {
                results[c] = fn(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(drain);
        drain();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace eqc
