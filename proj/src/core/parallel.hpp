#ifndef QRECT_CORE_PARALLEL_HPP
#define QRECT_CORE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qrect {

/// Global worker cap for parallel_for. 1 disables threading (default).
void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
/// the outcome is independent of scheduling order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qrect

#endif
