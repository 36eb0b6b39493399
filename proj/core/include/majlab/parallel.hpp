#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace majlab {

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, count). Each index writes only its own output
/// slot, so results do not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned used = static_cast<unsigned>(
      std::min<std::size_t>(workers, count));
  std::vector<std::thread> threads;
  threads.reserve(used);
  std::vector<std::exception_ptr> errors(used);
  for (unsigned w = 0; w < used; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += used) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

} // namespace majlab
