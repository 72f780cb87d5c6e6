#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hategraph {

// Parallel loop over independent indices. Each index writes only its own
// outputs, so results do not depend on scheduling. Exceptions from the body
// are captured and rethrown after the region (first one wins).
template <typename Fn>
void parallel_for(size_t n, Fn&& fn) {
#ifdef _OPENMP
  std::exception_ptr error;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(static_cast<size_t>(i));
    } catch (...) {
      bool expected = false;
      if (failed.compare_exchange_strong(expected, true)) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#else
  for (size_t i = 0; i < n; ++i) fn(i);
#endif
}

struct ChunkRange {
  size_t begin;
  size_t end;
};

// Fixed-size chunking. Reductions that accumulate one partial per chunk and
// combine the partials in chunk order give identical results for any thread
// count, which keeps run outputs reproducible.
inline std::vector<ChunkRange> make_chunks(size_t n, size_t chunk_size = 256) {
  std::vector<ChunkRange> chunks;
  if (chunk_size == 0) chunk_size = 1;
  for (size_t b = 0; b < n; b += chunk_size) chunks.push_back({b, b + chunk_size < n ? b + chunk_size : n});
  return chunks;
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hategraph
