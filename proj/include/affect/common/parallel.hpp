#pragma once

#include <cstddef>
#include <functional>

namespace affect {

/// Worker count from AFFECT_WORKERS, defaulting to the hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so the outcome is independent of scheduling.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace affect
