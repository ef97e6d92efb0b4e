#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace polyspectra::detail {

/// Calls body(k) for k in [0, count) across worker threads. Each index is
/// handled once; callers write to disjoint slots, so output does not depend
/// on scheduling.
template <typename Body>
void parallel_for(int count, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1)));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) body(k);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
}

}  // namespace polyspectra::detail
