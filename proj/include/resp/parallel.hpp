#pragma once

// Deterministic fork/join over index ranges. Work is split into at most
// `threads` contiguous chunks; callers merge per-chunk results in chunk
// order so the combined result depends only on the chunk count, and a
// single thread reproduces the canonical sequential order exactly.

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace resp {

inline int chunk_count(std::size_t n, int threads) {
    if (threads < 1) threads = 1;
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n ? n : 1));
}

// fn(chunk_index, begin, end) over fixed-size chunks, at most `threads`
// workers pulling chunks from a shared counter. Chunk boundaries depend only
// on n and chunk_size, never on the thread count, so per-chunk results
// merged in chunk order come out identical for every thread count.
inline void parallel_chunked(std::size_t n, std::size_t chunk_size, int threads,
                             const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk_size < 1) chunk_size = 1;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    const std::size_t workers =
        std::min<std::size_t>(chunks, static_cast<std::size_t>(threads < 1 ? 1 : threads));
    if (workers <= 1) {
        for (std::size_t k = 0; k < chunks; ++k)
            fn(k, k * chunk_size, std::min(n, (k + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t k = next.fetch_add(1); k < chunks; k = next.fetch_add(1))
                fn(k, k * chunk_size, std::min(n, (k + 1) * chunk_size));
        });
    for (auto& th : pool) th.join();
}

// fn(chunk_index, begin, end); chunk sizes differ by at most one.
inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    const int chunks = chunk_count(n, threads);
    if (chunks <= 1) {
        fn(0, 0, n);
        return;
    }
    const std::size_t base = n / chunks;
    const std::size_t rem = n % chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    std::size_t begin = 0;
    for (int k = 0; k < chunks; ++k) {
        const std::size_t len = base + (static_cast<std::size_t>(k) < rem ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&fn, k, begin, end] { fn(k, begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

} // namespace resp
