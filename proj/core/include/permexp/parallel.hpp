#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace permexp {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(tile) for tile = 0..tile_count-1 on up to `threads` workers.
// Tiles are claimed dynamically; callers keep per-tile accumulators and
// reduce them in tile order afterwards, so results do not depend on the
// thread count or on scheduling.
template <class Fn>
void run_tiles(std::size_t tile_count, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || tile_count <= 1) {
    for (std::size_t t = 0; t < tile_count; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= tile_count) return;
      fn(t);
    }
  };
  std::vector<std::thread> pool;
  std::size_t n_workers = std::min<std::size_t>(threads, tile_count);
  pool.reserve(n_workers);
  for (std::size_t i = 0; i + 1 < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace permexp
