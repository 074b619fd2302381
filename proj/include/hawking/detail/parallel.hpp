#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace hawking::detail {

// Runs fn(i) for i in [0, n) on contiguous blocks, one block per hardware
// thread.  Each index writes only its own output slot, so results do not depend
// on the thread count.  The exception from the lowest failing block wins.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  const int threads = std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), n / 64));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t * chunk; i < std::min(n, (t + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hawking::detail
