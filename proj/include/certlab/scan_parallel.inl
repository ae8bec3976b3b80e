// Inline template part of scan.hpp: a minimal static-free parallel loop.
// Work items are claimed from an atomic counter; every item writes only its
// own output slot, so scheduling order cannot affect results.

#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace certlab {

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 0) threads = default_thread_count();
  if (threads > n) threads = n;
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace certlab
