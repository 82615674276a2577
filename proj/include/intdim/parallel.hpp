#ifndef INTDIM_PARALLEL_HPP
#define INTDIM_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace intdim {

/// Worker count used by the parallel kernels. Starts from the INTDIM_NUM_WORKERS
/// environment variable when set, otherwise hardware concurrency.
std::size_t num_workers() noexcept;

/// Overrides the worker count for subsequent calls; 0 restores the default.
void set_num_workers(std::size_t workers) noexcept;

/// Runs body(begin, end) over contiguous slices of [0, n) on up to `workers` threads.
/// Slices are disjoint; the first exception thrown by any slice is rethrown.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

} // namespace intdim

#endif
