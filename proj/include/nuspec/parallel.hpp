#pragma once

#include <cstddef>
#include <functional>

namespace nuspec {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index runs exactly
// once; callers write into preallocated slot i, so results never depend on scheduling.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned default_thread_count();

}  // namespace nuspec
