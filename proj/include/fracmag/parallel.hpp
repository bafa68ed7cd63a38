#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace fracmag {

namespace detail {
inline std::atomic<int>& thread_count_storage() {
  static std::atomic<int> count{0};  // 0 = use hardware concurrency
  return count;
}
}  // namespace detail

inline void set_thread_count(int k) { detail::thread_count_storage().store(k < 0 ? 0 : k); }

inline int thread_count() {
  const int k = detail::thread_count_storage().load();
  if (k > 0) return k;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Compensated (Kahan) accumulator.
struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double t = v - c;
    const double s = sum + t;
    c = (s - sum) - t;
    sum = s;
  }
  double value() const { return sum; }
};

namespace detail {

/// Runs f(block_index, begin, end) over fixed-size blocks of [0, count).
/// Blocks are claimed dynamically but identified by index, so any per-block
/// outputs are independent of the number of workers and their scheduling.
template <class F>
void parallel_blocks(std::size_t count, std::size_t block_size, F&& f) {
  if (count == 0) return;
  const std::size_t nblocks = (count + block_size - 1) / block_size;
  const int workers =
      static_cast<int>(std::min<std::size_t>(nblocks, static_cast<std::size_t>(thread_count())));
  if (workers <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b)
      f(b, b * block_size, std::min(count, (b + 1) * block_size));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      f(b, b * block_size, std::min(count, (b + 1) * block_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

/// Pairwise tree reduction in a fixed order; bit-identical for any worker
/// count since the inputs are indexed by block.
inline double reduce_tree(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  std::size_t n = v.size();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n % 2) {
      v[half] = v[n - 1];
      n = half + 1;
    } else {
      n = half;
    }
  }
  return v[0];
}

}  // namespace detail
}  // namespace fracmag
