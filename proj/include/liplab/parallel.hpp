#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "liplab/types.hpp"

namespace liplab {

/// Worker count: LIPLAB_THREADS if set to a positive integer, else the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("LIPLAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) over contiguous blocks. Each index must write only its own output
/// slot, so the result does not depend on the thread count.
template <typename Body>
void parallel_for(Index n, unsigned threads, Body&& body) {
  const Index workers = std::clamp<Index>(static_cast<Index>(threads), 1, std::max<Index>(n, 1));
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (n + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (Index i = begin; i < end; ++i) body(i);
    });
  }
}

}  // namespace liplab
