#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace qtur {

/// Applies `f` to every index in [0, count) on up to `workers` threads and
/// returns the results in index order. The first exception thrown (lowest
/// index) is rethrown after all workers have joined.
template <class F>
auto parallel_map(std::size_t count, unsigned workers, F&& f)
    -> std::vector<decltype(f(std::size_t{}))> {
  using Result = decltype(f(std::size_t{}));
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qtur
