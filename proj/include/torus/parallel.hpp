#pragma once

#include <cstddef>
#include <functional>

namespace torus {

/// Worker count used by parallel_for; 1 runs inline.  Results never depend on it.
void set_worker_count(int workers);
int worker_count();

/// Runs body(i) for i in [0, n).  Each index is handled by exactly one worker; the
/// body must only write to per-index state.  The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace torus
