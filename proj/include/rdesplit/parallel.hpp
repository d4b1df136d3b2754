#pragma once

#include <cstddef>
#include <functional>

namespace rdesplit {

/// Worker count: RDE_SPLIT_THREADS if set to a positive integer, else hardware concurrency.
std::size_t thread_budget();

/// Runs body(0..count-1) on up to thread_budget() threads; rethrows the lowest-index exception.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rdesplit
