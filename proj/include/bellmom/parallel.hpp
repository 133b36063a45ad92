#pragma once

#include <cstddef>
#include <functional>

namespace bellmom {

/// Worker count for `requested` (0 = hardware concurrency, at least 1).
unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace bellmom
