#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ghzperc {

/// Worker count; 0 means one per hardware thread.
struct Parallelism {
  int threads = 0;

  int resolved() const noexcept {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
};

/// Runs `body(index, accumulator)` for every index in [0, count) and merges
/// the per-worker accumulators with `Acc::merge`. The result is independent
/// of the worker count as long as merging is commutative and associative.
template <class Acc, class Body>
Acc parallel_accumulate(std::size_t count, Parallelism par, Body&& body) {
  const auto workers =
      static_cast<std::size_t>(std::max(1, std::min<int>(par.resolved(), static_cast<int>(count))));
  if (workers <= 1) {
    Acc acc{};
    for (std::size_t i = 0; i < count; ++i) body(i, acc);
    return acc;
  }

  std::vector<Acc> partial(workers);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < count; i = next++) body(i, partial[w]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  Acc total{};
  for (const auto& acc : partial) total.merge(acc);
  return total;
}

}  // namespace ghzperc
