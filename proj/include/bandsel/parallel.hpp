#pragma once

#include <cstddef>
#include <functional>

namespace bandsel {

// Number of workers used by parallel_for. Reads BANDSEL_THREADS on first use
// (0 or unset means hardware concurrency). set_worker_count overrides it.
std::size_t worker_count();
void set_worker_count(std::size_t n);

// Runs body(i) for i in [0, n). Iterations must write to disjoint state.
// Nested calls from inside a worker run serially on that worker, so results
// never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bandsel
