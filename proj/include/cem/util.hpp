#ifndef CEM_UTIL_HPP
#define CEM_UTIL_HPP

#include <functional>
#include <string>

namespace cem {

/// Worker cap for concurrent sweep cells / loss partitions: the
/// COMPACTEM_WORKERS environment variable when set, else the hardware
/// concurrency (at least 1).
int worker_limit();

/// Run fn(0..count-1) on up to worker_limit() (or `workers`) threads,
/// block-partitioned. Exceptions propagate from the first failing index.
void parallel_for(int count, const std::function<void(int)>& fn, int workers = 0);

}  // namespace cem

#endif
