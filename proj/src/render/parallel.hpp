#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace nlos::detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Run body(begin, end) over contiguous bands of [0, n). Every index is owned by
/// exactly one band, so per-index results do not depend on the thread count.
template <typename Body>
void parallel_bands(int n, int threads, Body&& body) {
  const int t = std::clamp(resolve_threads(threads), 1, std::max(1, n));
  if (t == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k) {
    const int begin = static_cast<int>(static_cast<long>(n) * k / t);
    const int end = static_cast<int>(static_cast<long>(n) * (k + 1) / t);
    pool.emplace_back([&, k, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace nlos::detail
