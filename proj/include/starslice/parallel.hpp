#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

namespace starslice {

// Global worker count for sample-parallel loops. 0 = hardware concurrency.
void set_thread_count(int threads);
int thread_count();

namespace detail {
constexpr std::int64_t kChunkSize = 8192;
}

// Deterministic chunked map-reduce over [0, count). Work is split into
// fixed-size chunks; each chunk accumulates independently and chunk results
// are merged in chunk order, so the outcome is bit-identical for any thread
// count. `per_chunk(begin, end, acc)` must only touch its own accumulator.
template <typename Acc, typename PerChunk, typename Merge>
Acc chunked_reduce(std::int64_t count, Acc init, PerChunk per_chunk,
                   Merge merge) {
  if (count <= 0) return init;
  const std::int64_t chunks =
      (count + detail::kChunkSize - 1) / detail::kChunkSize;
  std::vector<Acc> partial(static_cast<std::size_t>(chunks), init);

  int workers = thread_count();
  if (workers > chunks) workers = static_cast<int>(chunks);

  auto run_range = [&](std::atomic<std::int64_t>& cursor) {
    for (;;) {
      std::int64_t c = cursor.fetch_add(1);
      if (c >= chunks) break;
      std::int64_t begin = c * detail::kChunkSize;
      std::int64_t end = std::min(count, begin + detail::kChunkSize);
      per_chunk(begin, end, partial[static_cast<std::size_t>(c)]);
    }
  };

  if (workers <= 1) {
    std::atomic<std::int64_t> cursor{0};
    run_range(cursor);
  } else {
    std::atomic<std::int64_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] { run_range(cursor); });
    for (auto& th : pool) th.join();
  }

  Acc out = init;
  for (const Acc& p : partial) merge(out, p);
  return out;
}

// Accumulator for mean / standard error of a sample stream.
struct MeanVar {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  void merge(const MeanVar& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    n += o.n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  // standard error of the mean; 0 for n < 2
  double std_error() const {
    if (n < 2) return 0.0;
    double m = mean();
    double var = (sum_sq - static_cast<double>(n) * m * m) /
                 static_cast<double>(n - 1);
    if (var < 0.0) var = 0.0;  // cancellation guard for near-constant streams
    return std::sqrt(var / static_cast<double>(n));
  }
};

// Argmax tracker; keeps the first index attaining the maximum.
struct BestIndex {
  double value = -std::numeric_limits<double>::infinity();
  std::int64_t index = -1;

  void consider(double v, std::int64_t i) {
    if (v > value) {
      value = v;
      index = i;
    }
  }
  void merge(const BestIndex& o) {
    if (o.index >= 0 && o.value > value) {
      value = o.value;
      index = o.index;
    }
  }
};

}  // namespace starslice
