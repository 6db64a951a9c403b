#pragma once

#include <cstddef>
#include <functional>

namespace mgfit {

// Runs fn(i) for every i in [0, n) on up to `workers` threads. fn must be
// safe to call concurrently for distinct i. Blocks until all iterations
// finish; the first exception thrown by fn is rethrown on the caller.
// Results must be written to per-index slots so the outcome does not depend
// on scheduling.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

// 0 or negative -> hardware concurrency (at least 1).
int resolve_workers(int requested);

}  // namespace mgfit
