#pragma once

#include <cstddef>
#include <functional>

namespace ffcc {

/// Worker count: FFCC_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs fn(0..count-1) across up to thread_count() threads. Work items are
/// claimed dynamically, so callers that need deterministic results must make
/// each item independent and combine results in index order afterwards.
/// The first exception thrown by any item is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace ffcc
