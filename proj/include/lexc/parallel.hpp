#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace lexc {

// Runs f(shard) for shard = 0..shards-1 on a small worker pool and returns the
// results indexed by shard. Results never depend on the number of threads.
template <class F>
auto run_shards(std::uint32_t shards, F&& f) -> std::vector<decltype(f(std::uint32_t{}))> {
  using Result = decltype(f(std::uint32_t{}));
  std::vector<Result> results(shards);
  std::vector<std::exception_ptr> errors(shards);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, shards);
  std::atomic<std::uint32_t> next{0};
  auto work = [&] {
    for (std::uint32_t s = next++; s < shards; s = next++) {
      try {
        results[s] = f(s);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace lexc
