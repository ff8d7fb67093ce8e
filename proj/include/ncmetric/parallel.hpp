#pragma once

#include <cstddef>
#include <functional>

namespace ncm {

/// Worker count: NCMETRIC_THREADS when set (≥ 1), else hardware concurrency.
std::size_t worker_count();

/// Calls fn(i) for i in [0, count) on up to worker_count() threads. Each index is
/// handled exactly once; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace ncm
