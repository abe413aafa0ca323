#pragma once

#include <cstddef>
#include <functional>

namespace deteval {

// Runs fn(i) for every i in [0, count) on up to `threads` workers (0 or 1
// runs inline). Indices are handed out dynamically; callers write results
// into per-index slots. The first exception by index is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace deteval
