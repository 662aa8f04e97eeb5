#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace otge {

/// Worker count for fan-out over independent cells, capped by the
/// OTGE_THREADS environment variable when set.
inline int worker_thread_count(int cells) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("OTGE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) hw = std::min(hw, cap);
    } catch (...) {
      // unparsable value: ignore
    }
  }
  return std::max(1, std::min(hw, cells));
}

/// Runs fn(0..cells-1), fanning out over worker threads. Cells must not
/// share mutable state. Exceptions propagate from the first failing cell.
inline void parallel_for(int cells, const std::function<void(int)>& fn) {
  const int workers = worker_thread_count(cells);
  if (workers <= 1) {
    for (int i = 0; i < cells; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < cells; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace otge
