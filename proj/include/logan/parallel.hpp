#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace logan {

/// Worker cap: LOGAN_THREADS if set to a positive integer, else the core count.
inline unsigned worker_count() {
  if (const char* env = std::getenv("LOGAN_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {
inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

/**
 * Runs body(i) for i in [0, count). Each index is processed exactly once and
 * results must be written to per-index slots, so the outcome does not depend
 * on the number of workers. The first exception thrown is rethrown. Calls made
 * from inside a worker run serially.
 */
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned workers = worker_count()) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
  if (detail::in_parallel_region()) workers = 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      detail::in_parallel_region() = true;
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace logan
