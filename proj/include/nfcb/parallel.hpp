// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_PARALLEL_HPP
#define NFCB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nfcb {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// Runs fn(i0, i1) over fixed-size blocks of [0, n). Block boundaries depend
// only on block_size, not on the worker count, so any per-block output is
// identical for every --threads value.
template <typename Fn>
void parallel_for_blocks(long n, long block_size, int threads, Fn&& fn) {
  if (n <= 0) return;
  threads = resolve_threads(threads);
  const long nblocks = (n + block_size - 1) / block_size;
  if (threads <= 1 || nblocks == 1) {
    for (long b = 0; b < nblocks; ++b)
      fn(b * block_size, std::min(n, (b + 1) * block_size));
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      long b = next.fetch_add(1);
      if (b >= nblocks) return;
      try {
        fn(b * block_size, std::min(n, (b + 1) * block_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int nworkers = int(std::min<long>(threads, nblocks));
  pool.reserve(nworkers);
  for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nfcb

#endif  // NFCB_PARALLEL_HPP
