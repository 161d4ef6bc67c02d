#pragma once

// Deterministic fork/join helpers. Work is split into chunks whose
// boundaries depend only on the problem size and a fixed chunk length, never
// on the worker count, and partial results are combined in chunk order. The
// numerical payload is therefore identical for any number of workers.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

namespace fsl {

/// Number of worker threads used by parallel helpers (0 = hardware default).
void set_worker_count(unsigned n);
unsigned worker_count();

/// Runs body(chunk_index, begin, end) over [0, n) in chunks of `chunk`.
template <class Body>
void for_each_chunk(std::size_t n, std::size_t chunk, Body&& body) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  const unsigned workers = std::min<std::size_t>(worker_count(), chunks);
  auto run_one = [&](std::size_t c) {
    const std::size_t b = c * chunk;
    body(c, b, std::min(n, b + chunk));
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_one(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run_one(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise (cascade) summation of a span in index order.
template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.empty()) return T{};
  if (v.size() <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) s += v[i];
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

/// Maps each chunk to a partial value and folds partials in chunk order.
template <class T, class ChunkMap>
T chunked_sum(std::size_t n, std::size_t chunk, ChunkMap&& map) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<T> partial(chunks);
  for_each_chunk(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    partial[c] = map(b, e);
  });
  return pairwise_sum(std::span<const T>(partial));
}

/// Stream seed for (seed, stream) pairs; a SplitMix64 finalizer.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fsl
