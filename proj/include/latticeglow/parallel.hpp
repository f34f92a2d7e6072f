#pragma once

#include <cstddef>
#include <functional>

namespace latticeglow {

// Worker count: LATTICEGLOW_THREADS when set to a positive integer,
// otherwise the hardware concurrency.
unsigned worker_count();

// Calls body(i) for every i in [0, count), spread over worker_count()
// threads. Iterations must be independent. The first exception thrown by
// any iteration is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace latticeglow
