#pragma once

// Fork-join helpers with a thread-count-independent work decomposition.
// Work is split into fixed-size chunks that depend only on the problem size;
// threads merely pick chunks up. Callers write per-chunk results into slots
// and merge them in chunk order, so results do not depend on the thread count.

#include <cstddef>
#include <functional>

namespace spherefold {

/// Worker count used by parallel_for_chunks. Defaults to the hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

inline constexpr std::size_t chunk_count(std::size_t n, std::size_t chunk) { return chunk == 0 ? 0 : (n + chunk - 1) / chunk; }

/// Calls fn(chunk_index, begin, end) for every chunk of [0, n).
void parallel_for_chunks(std::size_t n, std::size_t chunk,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Calls fn(i) for i in [0, n), each index its own task.
void parallel_for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace spherefold
