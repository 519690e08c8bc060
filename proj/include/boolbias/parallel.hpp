#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace boolbias {

/// Process-wide cap on worker threads (0 = hardware concurrency).
inline std::atomic<unsigned>& worker_cap() {
  static std::atomic<unsigned> cap{0};
  return cap;
}

inline void set_worker_cap(unsigned workers) { worker_cap().store(workers); }

inline unsigned effective_workers(unsigned requested = 0) {
  unsigned w = requested ? requested : worker_cap().load();
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return w;
}

/// Runs fn(worker_id, begin, end) over a contiguous partition of [0, total).
/// Work is split statically; determinism must come from per-index seeding,
/// which makes the result independent of the partition.
template <class Fn>
void parallel_regions(std::uint64_t total, unsigned workers, Fn&& fn) {
  workers = effective_workers(workers);
  if (total == 0) return;
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, total));
  if (workers <= 1) {
    fn(0u, std::uint64_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = total / workers;
  const std::uint64_t rem = total % workers;
  std::uint64_t begin = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t end = begin + chunk + (w < rem ? 1 : 0);
    pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
    begin = end;
  }
  for (auto& t : pool) t.join();
}

}  // namespace boolbias
