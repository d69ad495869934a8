#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace ratchet::cli {

template <class T>
struct TaskResult {
  std::optional<T> value;
  std::string error;  // empty on success
};

inline unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

/// Runs f(0..n-1) on a bounded pool. Results land at their own index, so the
/// merged order never depends on scheduling. Exceptions are captured per task.
template <class T, class F>
std::vector<TaskResult<T>> parallel_map(std::size_t n, unsigned threads, F&& f) {
  std::vector<TaskResult<T>> results(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i].value = f(i);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  const unsigned pool = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (pool <= 1) {
    worker();
    return results;
  }
  std::vector<std::thread> workers;
  workers.reserve(pool);
  for (unsigned t = 0; t < pool; ++t) workers.emplace_back(worker);
  for (auto& w : workers) w.join();
  return results;
}

}  // namespace ratchet::cli
