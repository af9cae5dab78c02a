#pragma once

#include <cstddef>
#include <functional>

namespace nlpot {

/// Process-wide worker count used when a call passes threads = 0. Defaults to 1.
void set_default_threads(int threads);
int default_threads() noexcept;

/// Runs body(i) for i in [0, count) on up to `threads` workers with static chunking.
///
/// Each index is evaluated exactly once and writes only its own slot, so results do
/// not depend on the worker count. If bodies throw, the exception of the smallest
/// failing index is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads = 0);

} // namespace nlpot
