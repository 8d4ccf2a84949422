#pragma once

#include <cstddef>
#include <functional>

namespace turnid {

/// Caps the worker count used by parallel_for. 0 means hardware concurrency.
void set_thread_count(std::size_t n) noexcept;
std::size_t thread_count() noexcept;

/// Runs fn(i) for i in [0, n). Work items must write only to their own slot.
/// Calls made from inside a worker run serially, so nested loops never
/// oversubscribe. If any item throws, the exception of the lowest failing index
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace turnid
