#pragma once
// Index-parallel loops and deterministic reductions.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fspectra {

/// Worker count: FS_THREADS if set, else `requested`, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (const char* env = std::getenv("FS_THREADS"); env && *env) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n). Each index writes only its own slot, so
/// results do not depend on scheduling. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise (cascade) summation in index order.
template <class T>
T pairwise_sum(const std::vector<T>& values, std::size_t lo, std::size_t hi) {
  if (hi <= lo) return T{};
  if (hi - lo <= 8) {
    T total = values[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) total += values[i];
    return total;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

template <class T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(values, 0, values.size());
}

}  // namespace fspectra
