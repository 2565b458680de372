#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bondlab {

// Run fn(i) for i in [0, n) on up to `jobs` threads. Each index is visited
// exactly once; callers write results into pre-sized slots so the output is
// independent of scheduling. The first exception thrown is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

// Split [0, n) into runs sharing the same key (input must be grouped).
template <class KeyFn>
std::vector<std::pair<std::size_t, std::size_t>> group_runs(std::size_t n, KeyFn&& key) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || !(key(i) == key(start))) {
      if (n) runs.emplace_back(start, i);
      start = i;
    }
  }
  return runs;
}

}  // namespace bondlab
