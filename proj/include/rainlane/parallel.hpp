#pragma once

#include <functional>

namespace rainlane {

/// Worker count used by row-parallel loops. Defaults to the RAINLANE_THREADS
/// environment variable, or 1 when unset.
int thread_count();
void set_thread_count(int n);

/// Calls fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so callers that write only to their own indices get results identical to a
/// sequential run.
void parallel_for(int n, const std::function<void(int, int)>& fn);

}  // namespace rainlane
