#pragma once

#include <cstddef>
#include <functional>

namespace fairdyn {

/// Worker count: FAIRDYN_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across up to `threads` workers (0 means
/// worker_count()). Iterations are statically partitioned into contiguous
/// chunks, so results written by index are deterministic. The first
/// exception thrown by any iteration is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace fairdyn
