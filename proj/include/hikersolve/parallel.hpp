#pragma once

#include <cstddef>
#include <functional>

namespace hikersolve {

/// Caps worker threads used by every level-parallel pass. 0 restores the
/// default (hardware concurrency).
void set_max_threads(std::size_t threads);
std::size_t max_threads();

/// Runs body(i) for i in [0, count). Iterations must be independent; each
/// one writes only its own outputs, so results are identical for any thread
/// count. Exceptions thrown by body are rethrown on the calling thread (the
/// one from the lowest failing index wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hikersolve
