#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace copasbias {

// Thread count resolution: explicit request wins, then COPAS_BIAS_THREADS,
// then hardware concurrency. 0 means "decide for me" at every level.
inline unsigned resolve_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("COPAS_BIAS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs body(i) for i in [0, count). Each index writes only to its own slot
// of any output buffer, so results are identical for every thread count.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    if (count == 0) return;
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < count; i += n_threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace copasbias
