#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bira {

inline int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Runs fn(i) for i in [begin, end) on `workers` threads, dispatching chunks
/// through an atomic counter. Each index is processed exactly once by one
/// worker, so results written to disjoint slots are identical for any worker
/// count. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(long begin, long end, int workers, Fn&& fn, long chunk = 1) {
  if (end <= begin) return;
  const long total = end - begin;
  if (workers <= 1 || total == 1) {
    for (long i = begin; i < end; ++i) fn(i);
    return;
  }
  if (chunk < 1) chunk = 1;
  std::atomic<long> next(begin);
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const long lo = next.fetch_add(chunk);
      if (lo >= end) return;
      const long hi = std::min(end, lo + chunk);
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<long>(workers, total)) - 1;
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bira
