/*
 * Slot-based worker pool for independent trials. Each task writes results
 * into its own pre-assigned slot, so aggregation order never depends on the
 * number of threads. INTERFEROLAB_THREADS caps the pool.
 */

#pragma once

#include <cstddef>
#include <functional>

namespace interferolab {

/// Worker count: INTERFEROLAB_THREADS if set (clamped to >= 1), otherwise
/// the hardware concurrency.
int thread_budget();

/// Runs body(i) for i in [0, count). Tasks must be independent and must
/// only write to per-index state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace interferolab
