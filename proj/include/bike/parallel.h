#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bike {

inline std::size_t resolve_threads(std::size_t const requested) {
  if (requested != 0) {
    return requested;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n). Results must be written to slot i so the
// output order does not depend on scheduling. If several calls throw, the
// exception of the lowest index is rethrown.
template <typename Fn>
void parallel_for(std::size_t const n, std::size_t const threads, Fn&& fn) {
  auto const t = std::min(resolve_threads(threads), n);
  if (t <= 1) {
    for (auto i = std::size_t{0}; i != n; ++i) {
      fn(i);
    }
    return;
  }
  auto next = std::atomic<std::size_t>{0};
  auto m = std::mutex{};
  auto first_error = n;
  auto error = std::exception_ptr{};
  auto const work = [&]() {
    for (auto i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        auto const lock = std::lock_guard{m};
        if (i < first_error) {
          first_error = i;
          error = std::current_exception();
        }
      }
    }
  };
  auto pool = std::vector<std::thread>{};
  for (auto k = std::size_t{1}; k < t; ++k) {
    pool.emplace_back(work);
  }
  work();
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace bike
