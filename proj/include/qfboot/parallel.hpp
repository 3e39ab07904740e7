#pragma once

#include <cstddef>
#include <functional>

namespace qfboot {

/// Resolves a requested thread count; 0 means hardware concurrency.
[[nodiscard]] std::size_t resolve_threads(std::size_t requested) noexcept;

/// Runs body(i) for i in [0, count) on up to `threads` workers pulling from a
/// shared counter. Bodies must only write to index-owned state. The first
/// exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace qfboot
