// Copyright 2026 The optdesign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPTDESIGN_PARALLEL_HPP
#define OPTDESIGN_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace optdesign {

// Worker cap for library calls. threads == 0 means hardware concurrency.
struct Exec {
  unsigned threads = 0;

  unsigned resolved() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
// reductions happen afterwards in index order, so output does not depend on
// the thread count. The first exception thrown by any task is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, const Exec& exec, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(exec.resolved(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

// Pairwise summation over a fixed tree; identical result for identical input.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// log(sum(exp(xs))). Returns -inf for empty input or all -inf.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  std::vector<double> scaled(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) scaled[i] = std::exp(xs[i] - hi);
  return hi + std::log(pairwise_sum(scaled));
}

}  // namespace optdesign

#endif  // OPTDESIGN_PARALLEL_HPP
