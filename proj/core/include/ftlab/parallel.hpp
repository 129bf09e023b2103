#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ftlab {

/// Thread budget handed down from the caller. Modules never spawn more
/// workers than `threads`.
struct Parallelism {
  unsigned threads = 1;
};

/// Runs body(i) for i in [0, count). Indices are split into contiguous
/// static blocks, so any per-index output written to slot i is independent
/// of the thread count. The first exception thrown by a worker is rethrown.
template <class Body>
void parallel_for(std::size_t count, Parallelism par, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, par.threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ftlab
