#pragma once

#include <cstddef>
#include <functional>

namespace heatfm {

/// Number of worker threads used by parallel_for. Defaults to 1.
int thread_count();
void set_thread_count(int threads);

/// Runs body(i) for i in [0, n). Tasks are independent and each writes its
/// own output slot, so results do not depend on the thread count. The first
/// exception thrown by a task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace heatfm
