#include "warpkit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace warpkit {

int worker_thread_count() {
    if (const char* env = std::getenv("WARP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_rows(int height, const std::function<void(int)>& fn) {
    const int threads = std::min(worker_thread_count(), std::max(height, 1));
    if (threads <= 1 || height <= 1) {
        for (int y = 0; y < height; ++y) fn(y);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int y = t; y < height; y += threads) fn(y);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace warpkit
