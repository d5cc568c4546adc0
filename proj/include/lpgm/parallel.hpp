#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lpgm {

/// 0 means "use the hardware concurrency".
unsigned resolve_threads(unsigned requested);

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and
/// returns the results in index order. Work is handed out in fixed chunks;
/// since each result depends only on its index, the output does not depend
/// on the thread count.
template <class Fn>
auto parallel_map(std::int64_t count, unsigned threads, Fn&& fn) {
  using Result = decltype(fn(std::int64_t{0}));
  std::vector<Result> out(static_cast<std::size_t>(count));
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::int64_t>(resolve_threads(threads), 1, std::max<std::int64_t>(count, 1)));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  constexpr std::int64_t kChunk = 64;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::int64_t begin = next.fetch_add(kChunk);
        if (begin >= count) return;
        const std::int64_t end = std::min(begin + kChunk, count);
        for (std::int64_t i = begin; i < end; ++i) out[static_cast<std::size_t>(i)] = fn(i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace lpgm
