#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace serrin {

/// Splits [0, n) into `threads` contiguous chunks and calls fn(chunk, begin, end)
/// for each. Chunk boundaries depend only on n and threads, so reductions
/// combined in chunk order are deterministic.
template <class Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
    const auto t = static_cast<std::size_t>(std::max(1, threads));
    if (t == 1 || n < 2 * t) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + t - 1) / t;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t c = 0; c < t; ++c) {
        const std::size_t begin = std::min(n, c * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace serrin
