#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace vlk {

/// Number of workers: explicit request, else VLK_THREADS, else 1.
unsigned resolve_threads(unsigned requested);

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited by exactly one worker; callers write results by index so output
/// never depends on the worker count.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers <= 1) {
    if (n > 0) body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace vlk
