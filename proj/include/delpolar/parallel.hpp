#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace delpolar {

/// Runs f(k) for k in [0, count) on up to `workers` threads. Callers write
/// results into per-index slots so the outcome never depends on scheduling.
template <typename F>
void parallel_for(std::size_t count, unsigned workers, F&& f) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k)
      f(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto run = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count)
        return;
      try {
        f(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  for (unsigned w = 0; w < spawn; ++w)
    pool.emplace_back(run);
  for (std::thread& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace delpolar
