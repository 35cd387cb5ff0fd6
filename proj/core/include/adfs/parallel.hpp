#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace adfs {

/// Worker count from ADFS_WORKERS, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("ADFS_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

inline constexpr std::size_t kParallelBlock = 4096;

/// Runs fn(block_index, begin, end) over fixed-size blocks of [0, count).
/// Block boundaries do not depend on the worker count, so per-block results
/// combined in block order are bit-identical for any number of workers.
template <class Fn>
void for_each_block(std::size_t count, Fn&& fn, std::size_t block = kParallelBlock) {
  const std::size_t blocks = (count + block - 1) / block;
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(worker_count(), blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b, b * block, std::min(count, (b + 1) * block));
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < blocks; b += workers) {
        try {
          fn(b, b * block, std::min(count, (b + 1) * block));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Deterministic blocked reduction: partial(begin, end) per block, summed in
/// block order.
template <class T, class Partial>
T blocked_sum(std::size_t count, T zero, Partial&& partial, std::size_t block = kParallelBlock) {
  const std::size_t blocks = (count + block - 1) / block;
  std::vector<T> parts(blocks, zero);
  for_each_block(
      count, [&](std::size_t b, std::size_t lo, std::size_t hi) { parts[b] = partial(lo, hi); }, block);
  T total = zero;
  for (const auto& p : parts) total += p;
  return total;
}

}  // namespace adfs
