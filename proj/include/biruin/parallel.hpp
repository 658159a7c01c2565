#pragma once

#include <cstddef>
#include <functional>

namespace biruin {

// Runs fn(i) for i in [0, n) on a fixed pool of threads (0 = hardware concurrency).
// If a call throws, remaining indices are skipped and the exception with the
// smallest index among the failed calls is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

unsigned default_workers();

}  // namespace biruin
