#pragma once

#include <cstddef>
#include <functional>

namespace projlab {

/// Number of worker threads to use. Reads PROJLAB_THREADS; 0 or unset means
/// the hardware concurrency.
std::size_t thread_budget();

/// Runs fn(i) for i in [begin, end), split into contiguous chunks across the
/// thread budget. Every index writes only its own output slots, so results
/// are bit-identical to a sequential loop regardless of thread count.
/// Exceptions thrown by fn are rethrown on the calling thread (first wins).
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace projlab
