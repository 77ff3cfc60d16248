#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace recede {

// Worker cap: min(hardware, 8), further capped by RECEDE_THREADS. Value 1
// disables threading entirely.
inline int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = static_cast<int>(hw == 0 ? 1 : std::min(hw, 8u));
  if (const char* env = std::getenv("RECEDE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min<long>(n, v);
  }
  return std::max(1, n);
}

// Index-space map. Each index writes only its own slot in the caller's output,
// so the result is identical no matter how indices land on threads.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace recede
