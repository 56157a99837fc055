#pragma once

#include <functional>

namespace warpkit {

/// Number of worker threads for per-pixel loops. Reads WARP_THREADS (>=1);
/// falls back to the hardware thread count.
int worker_thread_count();

/// Runs fn(y) for every row y in [0, height), split across worker threads.
/// Each row is computed independently, so the output is bitwise identical
/// for any thread count.
void parallel_rows(int height, const std::function<void(int)>& fn);

} // namespace warpkit
