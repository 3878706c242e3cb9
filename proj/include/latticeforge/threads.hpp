#pragma once

// Shared-nothing sharding for the few operations whose contracts allow
// internal parallelism. Each shard writes its own slot; the caller merges in
// shard-index order, so results never depend on scheduling. LATTICEFORGE_THREADS
// caps the worker count (default: hardware concurrency).

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace latticeforge {

inline unsigned thread_budget() {
  if (const char* env = std::getenv("LATTICEFORGE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min(v, 256L));
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(shard) for shard = 0 .. shard_count-1 on at most thread_budget()
// workers. fn must only touch per-shard state.
template <typename Fn>
inline void run_sharded(unsigned shard_count, Fn&& fn) {
  unsigned workers = std::min(shard_count, thread_budget());
  if (workers <= 1) {
    for (unsigned s = 0; s < shard_count; ++s) fn(s);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&fn, w, workers, shard_count] {
      for (unsigned s = w; s < shard_count; s += workers) fn(s);
    });
  for (auto& t : pool) t.join();
}

}  // namespace latticeforge
