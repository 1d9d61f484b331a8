#pragma once

#include <cstddef>
#include <functional>

namespace tiara {

/// Worker cap: TIARA_THREADS if set to a positive integer, else hardware concurrency.
unsigned default_thread_count() noexcept;

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = default).
/// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace tiara
