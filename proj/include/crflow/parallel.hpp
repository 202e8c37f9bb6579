#pragma once

#include <cstddef>
#include <functional>

namespace crflow {

/// Worker count for point-parallel kernels, from CRFLOW_THREADS (default 1).
int thread_count();

/// Runs fn(begin, end) over a static partition of [0, count). Workers write to
/// disjoint ranges only; reductions stay with the caller (serial, fixed order)
/// so results are bitwise independent of the thread count.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace crflow
