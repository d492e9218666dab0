#pragma once

#include <cstddef>
#include <functional>

namespace dirmatch {

// Global cap on worker threads. 0 = hardware concurrency.
void set_thread_cap(int threads);
int thread_cap();

// Runs fn(i) for i in [begin, end) on up to thread_cap() workers.
// Work is split into contiguous ranges; every invocation writes only
// state owned by index i, so results are identical for any thread count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

// Range flavor: fn(lo, hi) gets a contiguous chunk. Useful when per-index
// dispatch is too fine-grained.
void parallel_for_chunked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace dirmatch
