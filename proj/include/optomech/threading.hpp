#pragma once

#include <cstddef>
#include <functional>

namespace optomech {

// Worker cap from OPTOMECH_THREADS, falling back to the hardware count.
int thread_budget();

// Runs fn(i) for i in [0, n). Splits into contiguous blocks across at most
// thread_budget() workers; fn must only write state private to index i, so
// results do not depend on the split.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace optomech
