#pragma once

#include <cstddef>
#include <functional>

namespace doubletscope {

// Worker count from DOUBLETSCOPE_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to `workers` threads. If any call throws, the
// exception from the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

} // namespace doubletscope
