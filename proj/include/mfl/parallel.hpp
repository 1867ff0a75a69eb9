#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mfl {

enum class ReductionMode {
  /// Fixed sequential summation order; bit-reproducible across thread counts.
  Deterministic,
  /// Per-worker partial sums; low-order bits depend on the thread count.
  Parallel,
};

struct Execution {
  unsigned threads = 1;
  ReductionMode reduction = ReductionMode::Deterministic;
};

/// Calls fn(begin, end) on contiguous ranges covering [0, n), giving each
/// worker at least `grain` items.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn, std::size_t grain = 4096) {
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n / std::max<std::size_t>(grain, 1), 1));
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
}

}  // namespace mfl
