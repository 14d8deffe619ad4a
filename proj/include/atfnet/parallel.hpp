#pragma once

#include <cstddef>
#include <functional>

namespace atfnet {

/// Worker count from ATFNET_THREADS; 1 when unset or unparsable.
int thread_count();

/// Calls fn(i) for i in [0, n), split into contiguous chunks over
/// thread_count() threads. fn must only write to slot i of its outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace atfnet
