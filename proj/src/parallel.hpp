#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace citesim::detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(worker) on `threads` workers (the caller acts as worker 0).
// Work distribution inside body is the caller's business.
template <class Body>
void run_workers(unsigned threads, Body&& body) {
  if (threads <= 1) {
    body(0u);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back([&body, w] { body(w); });
  body(0u);
}

}  // namespace citesim::detail
