#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ghostspec {

// Worker count: hardware concurrency capped by the GHOSTSPEC_THREADS
// environment variable (values < 1 or unparsable input are ignored).
inline unsigned thread_budget() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("GHOSTSPEC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1)
      n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

// Runs fn(i) for i in [0, n); results are produced into a vector indexed by i,
// so the output is identical regardless of scheduling.  fn must be pure.
template <class R, class F>
std::vector<R> parallel_map_ordered(std::size_t n, const F& fn) {
  std::vector<R> results(n);
  const unsigned workers = std::min<unsigned>(thread_budget(),
                                              static_cast<unsigned>(n ? n : 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        results[i] = fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace ghostspec
