// Counter-keyed RNG streams and an order-preserving parallel map.
//
// Results depend only on (master seed, experiment id, task index), never on
// how tasks are scheduled across threads.
#pragma once

#include "wptim/core.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace wptim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t experiment, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ experiment) ^ index);
}

inline Engine make_stream(std::uint64_t master, std::uint64_t experiment, std::uint64_t index) {
  return Engine(stream_seed(master, experiment, index));
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; result i lands in slot i.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> out(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, unsigned(std::min<std::size_t>(n, 1u << 16))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// Pairwise tree sum over values in index order.
template <typename T, typename Op>
T tree_reduce(std::vector<T> values, Op op, T empty = T{}) {
  if (values.empty()) return empty;
  while (values.size() > 1) {
    std::vector<T> next;
    next.reserve((values.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < values.size(); i += 2) next.push_back(op(values[i], values[i + 1]));
    if (values.size() % 2) next.push_back(values.back());
    values = std::move(next);
  }
  return values.front();
}

// Mean and spread accumulator (Welford), mergeable across tasks.
struct MomentSum {
  double mean_ = 0;
  double m2_ = 0;
  std::size_t count = 0;

  void add(double v) {
    ++count;
    const double delta = v - mean_;
    mean_ += delta / double(count);
    m2_ += delta * (v - mean_);
  }
  friend MomentSum operator+(const MomentSum& a, const MomentSum& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    MomentSum r;
    r.count = a.count + b.count;
    const double delta = b.mean_ - a.mean_;
    r.mean_ = a.mean_ + delta * double(b.count) / double(r.count);
    r.m2_ = a.m2_ + b.m2_ + delta * delta * double(a.count) * double(b.count) / double(r.count);
    return r;
  }
  double mean() const { return mean_; }
  double variance() const { return count < 2 ? 0.0 : m2_ / double(count - 1); }
  double std_err() const { return count < 2 ? 0.0 : std::sqrt(variance() / double(count)); }
};

}  // namespace wptim
