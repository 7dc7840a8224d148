#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mrt {

inline unsigned thread_count() {
    if (const char* env = std::getenv("MRT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    unsigned n = std::thread::hardware_concurrency();
    return n ? n : 1;
}

// Chunked parallel map over [0, n). Work items must not alias writes.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned nt = thread_count();
    if (nt <= 1 || n < 2 * nt) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, n / (8 * nt));
    auto worker = [&] {
        for (;;) {
            std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) break;
            std::size_t end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace mrt
