#pragma once
#include <cstddef>
#include <functional>

namespace chacon {

// Worker count: CHACONLAB_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, count) on up to worker_count() threads. Work is
// handed out by index, so results written to slot i are independent of the
// schedule. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace chacon
