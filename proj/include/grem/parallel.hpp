#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <utility>
#include <thread>
#include <vector>

namespace grem {

/// Runs fn(chunk) for chunk in [0, chunks) on a small thread pool. Callers
/// write results into per-chunk slots, so output never depends on the
/// schedule or on the number of hardware threads.
/// An exception from any chunk is rethrown after all workers finish (the
/// one from the lowest-numbered failing chunk).
template <class Fn>
void parallel_chunks(std::size_t chunks, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(chunks, std::max(1U, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += workers) {
          try {
            fn(c);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Half-open slice [begin, end) of `count` items owned by `chunk`.
inline std::pair<std::size_t, std::size_t> chunk_range(std::size_t count, std::size_t chunks,
                                                       std::size_t chunk) {
  const std::size_t per = (count + chunks - 1) / chunks;
  const std::size_t begin = std::min(count, chunk * per);
  return {begin, std::min(count, begin + per)};
}

}  // namespace grem
