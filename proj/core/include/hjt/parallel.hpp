#pragma once

// Deterministic parallel search over an index range.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hjt {

/// Worker count from HJT_WORKERS, or 1.
inline int default_workers() {
  if (const char* env = std::getenv("HJT_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

/// Least i < n with pred(i), or n. The answer does not depend on `workers`
/// and every index below the answer is evaluated exactly once.
template <class Pred>
std::size_t parallel_find_first(std::size_t n, int workers, Pred&& pred, std::size_t chunk = 1) {
  chunk = std::max<std::size_t>(chunk, 1);
  if (workers <= 1 || n <= chunk) {
    for (std::size_t i = 0; i < n; ++i) {
      if (pred(i)) return i;
    }
    return n;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{n};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n || begin >= best.load()) return;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t i = begin; i < end && i < best.load(); ++i) {
        bool hit = false;
        try {
          hit = pred(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          best.store(0);
          return;
        }
        if (hit) {
          std::size_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
          break;
        }
      }
    }
  };
  const auto count = static_cast<std::size_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(count - 1);
  for (std::size_t w = 1; w < count; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return best.load();
}

}  // namespace hjt
