#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace uos {

/// Runs fn(i) for i in [0, count) on a pool of worker threads. Work items
/// must be independent and write only to their own slots; the scheduling
/// order is unspecified, so determinism has to come from per-item seed
/// derivation, never from shared engine state. threads = 0 picks the
/// hardware concurrency.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& fn) {
  if (count <= 0) return;
  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace uos
