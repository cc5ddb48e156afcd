#pragma once

#include <cstddef>
#include <functional>

namespace npfaber {

/// Worker count: NPFABER_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks on up to
/// thread_count() threads. Each index is visited exactly once, so callers
/// writing to distinct slots get deterministic results.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace npfaber
