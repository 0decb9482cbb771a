#pragma once

#include <cstddef>
#include <functional>

namespace lrdecon {

/// LRDECON_THREADS if set, else hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Results must go to per-index slots; the first exception by index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

}  // namespace lrdecon
