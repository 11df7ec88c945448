#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace edgespec {

// Items per work block. Block boundaries depend only on the item count, so
// per-block partial results reduced in block order are independent of the
// number of threads.
inline constexpr std::size_t kBlockSize = 64;

inline std::size_t block_count(std::size_t items) { return (items + kBlockSize - 1) / kBlockSize; }

// Calls fn(block, begin, end) once for every block of [0, items). With
// threads <= 1 everything runs on the calling thread. If several blocks
// throw, the exception of the lowest block index is rethrown.
template <typename Fn>
void for_each_block(std::size_t items, int threads, Fn&& fn) {
  const std::size_t blocks = block_count(items);
  auto run_block = [&](std::size_t blk) {
    const std::size_t begin = blk * kBlockSize;
    fn(blk, begin, std::min(items, begin + kBlockSize));
  };
  if (threads <= 1 || blocks <= 1) {
    for (std::size_t blk = 0; blk < blocks; ++blk) run_block(blk);
    return;
  }
  std::vector<std::exception_ptr> errors(blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t blk = next++; blk < blocks; blk = next++) {
      try {
        run_block(blk);
      } catch (...) {
        errors[blk] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), blocks);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace edgespec
