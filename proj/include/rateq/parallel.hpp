#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rateq {

/// Worker count: explicit jobs > 0 wins, then the RATEQ_JOBS environment
/// variable, then all cores.
inline int resolveJobs(int jobs) {
  if (jobs > 0) return jobs;
  if (const char* env = std::getenv("RATEQ_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, count). Tasks must write results into
/// index-addressed slots; the schedule never affects the output.
inline void parallelFor(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  int workers = resolveJobs(jobs);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next(0);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace rateq
