#pragma once

#include <cstddef>
#include <functional>

namespace patchrestore {

/// Worker cap: PATCHRESTORE_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
int worker_count();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// body(begin, end) on each. Blocks until all chunks finish. The first
/// exception thrown by any chunk is rethrown on the calling thread.
///
/// Results are independent of the worker count as long as each index writes
/// only its own outputs.
void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                         int workers = 0);

}  // namespace patchrestore
