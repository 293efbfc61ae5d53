#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ilscape {

// Worker count for data-parallel loops. ILSCAPE_THREADS=0 or unset means
// hardware concurrency; 1 forces serial execution.
inline unsigned worker_count() {
    unsigned n = 0;
    if (const char* env = std::getenv("ILSCAPE_THREADS")) {
        n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
    if (n == 0) n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    return n;
}

// Static block partition over [0, count). Workers write only to disjoint
// per-index slots; any cross-index reduction must happen after the join,
// in index order, so results never depend on thread scheduling.
inline void parallel_for(size_t count,
                         const std::function<void(size_t)>& body) {
    const unsigned workers = worker_count();
    if (workers <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const size_t begin = static_cast<size_t>(w) * chunk;
        if (begin >= count) break;
        const size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, begin, end] {
            for (size_t i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace ilscape
