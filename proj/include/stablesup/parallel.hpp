#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stablesup {

inline constexpr std::uint64_t kDefaultChunk = 4096;

inline unsigned resolve_workers(unsigned workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

// Splits [0, n) into fixed-size chunks, runs fn(begin, end, acc) for each
// chunk on a per-chunk copy of init, and merges the chunk results in chunk
// order. The chunk layout does not depend on the worker count, so the
// result is bit-identical for any number of workers.
template <class Acc, class Fn>
Acc chunked_reduce(std::uint64_t n, unsigned workers, const Acc& init, Fn&& fn,
                   std::uint64_t chunk = kDefaultChunk) {
  const std::uint64_t nchunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<Acc> parts(nchunks, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;

  auto worker = [&]() {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      try {
        const std::uint64_t b = c * chunk;
        fn(b, std::min(n, b + chunk), parts[c]);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(nchunks);
        return;
      }
    }
  };

  const unsigned w = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(nchunks, 1)));
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);

  Acc out = init;
  for (auto& p : parts) out.merge(p);
  return out;
}

}  // namespace stablesup
