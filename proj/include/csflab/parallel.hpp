#pragma once

#include <cstddef>
#include <functional>

namespace csflab {

// Worker count for data-parallel loops (default 1; 0 = hardware concurrency).
void set_threads(unsigned n);
unsigned threads();

// Calls fn(i) for i in [0, n), split into contiguous blocks across threads.
// fn must not touch shared mutable state. Exceptions are rethrown on the
// calling thread (the first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace csflab
