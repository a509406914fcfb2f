#pragma once

#include <cstddef>
#include <functional>

namespace cardio {

/// Worker cap from CARDIO_THREADS (default 1).
int thread_count();
/// Overrides the worker cap for this process (tests, CLI).
void set_thread_count(int n);

/**
 * Runs fn(begin, end) over contiguous chunks of [0, n).
 *
 * Chunks are disjoint, so per-index work that only writes its own outputs
 * gives results identical to the sequential loop.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace cardio
