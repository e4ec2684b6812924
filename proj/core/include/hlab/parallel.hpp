#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hlab {

// Runs fn(i) for i in [0, n) on up to `jobs` threads.  Work is striped so
// that uneven per-index costs balance; jobs <= 1 (or tiny n) runs inline.
// fn must be safe to call concurrently for distinct i.  If any call throws,
// the first exception is rethrown on the calling thread after all workers
// finish (remaining indices on the throwing worker's stripe are skipped).
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (jobs > n) jobs = n;
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([=, &fn, &first_error, &error_mutex] {
      try {
        for (int i = t; i < n; i += jobs) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hlab
