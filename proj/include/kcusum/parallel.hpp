#pragma once

#include <cstddef>
#include <functional>

namespace kcusum {

/// Resolves a requested thread count: 0 means std::thread::hardware_concurrency().
[[nodiscard]] unsigned resolve_threads(unsigned requested) noexcept;

/// Runs fn(i) for i in [0, n) on up to `threads` workers pulling indices from a
/// shared counter. Callers write results into slot i, so output order never
/// depends on scheduling. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace kcusum
