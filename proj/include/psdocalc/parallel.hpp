#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace psdocalc {

/// Worker count from PSDOCALC_WORKERS, defaulting to the hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on the worker pool. Each index is handled by
/// exactly one worker, so writes to slot i of a presized output are race-free.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace psdocalc
