#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace dodecawave {

// Worker count: hardware concurrency, capped by DODECAWAVE_THREADS when set.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DODECAWAVE_THREADS")) {
    try {
      long cap = std::stol(env);
      if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    } catch (...) {
    }
  }
  return n;
}

// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries depend only on n and
// the worker count, and each index is written by exactly one chunk.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 4096) {
  unsigned workers = worker_count();
  std::size_t chunks = std::min<std::size_t>(workers, (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
  if (chunks <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t step = (n + chunks - 1) / chunks;
  for (std::size_t c = 1; c < chunks; ++c) {
    std::size_t b = c * step, e = std::min(n, b + step);
    if (b < e) pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(std::size_t{0}, std::min(n, step));
  for (auto& t : pool) t.join();
}

}  // namespace dodecawave
