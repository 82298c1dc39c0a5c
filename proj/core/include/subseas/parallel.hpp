#pragma once

#include <cstddef>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace subseas {

/// Runs body(i) for i in [0, n). Bodies must write only to slot i; callers
/// reduce afterwards in index order, which keeps results independent of the
/// thread count. The degree of parallelism is whatever tbb::task_arena the
/// caller is executing in.
template <typename Body>
void parallel_for_each_index(std::size_t n, Body&& body) {
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n),
                    [&](const tbb::blocked_range<std::size_t>& r) {
                      for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
                    });
}

}  // namespace subseas
