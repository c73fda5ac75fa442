#pragma once

#include <cstddef>
#include <functional>

namespace msfa {

// Worker cap: MSFA_THREADS if set to a positive integer, else the hardware
// concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, count). Results must be written to
// index-addressed slots so output never depends on scheduling order.
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace msfa
