#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace mlid {

// Worker count: explicit value if positive, else MLID_WORKERS, else hardware.
int resolve_workers(int requested);

// Pairwise (tree) summation. The association order depends only on the
// length of the input, so results are bit-stable.
template <class T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

// Evaluates fn(chunk_index) for chunk_index in [0, chunks) on up to `workers`
// threads and returns the results in chunk order. Chunk boundaries are chosen
// by the caller, never by the worker count, so any reduction over the returned
// vector is identical for every worker count.
template <class Fn>
auto parallel_map(std::size_t chunks, int workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(chunks);
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), chunks);
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) out[c] = fn(c);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += threads) out[c] = fn(c);
    });
  }
  pool.clear();
  return out;
}

// Splits [0, total) into `chunks` contiguous ranges of near-equal size.
struct ChunkRange {
  std::size_t begin;
  std::size_t end;
};

inline ChunkRange chunk_range(std::size_t total, std::size_t chunks, std::size_t index) {
  const std::size_t base = total / chunks;
  const std::size_t extra = total % chunks;
  const std::size_t begin = index * base + std::min(index, extra);
  return {begin, begin + base + (index < extra ? 1 : 0)};
}

}  // namespace mlid
