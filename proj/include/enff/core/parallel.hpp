/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace enff {

/// Static-chunk parallel loop. Work item i must write only to slot i, so results are
/// independent of the worker count. If several items throw, the exception of the
/// smallest index is rethrown, which is also what a serial loop would report.
class Parallel {
 public:
  explicit Parallel(int workers = 1) : workers_(std::max(1, workers)) {}

  int workers() const { return workers_; }

  template <class F>
  void for_each(std::size_t n, F&& f) const {
    const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers_), n);
    if (nw <= 1) {
      for (std::size_t i = 0; i < n; ++i) f(i);
      return;
    }
    std::vector<std::exception_ptr> errors(nw);
    std::vector<std::size_t> failed_at(nw, n);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t lo = n * w / nw;
        const std::size_t hi = n * (w + 1) / nw;
        for (std::size_t i = lo; i < hi; ++i) {
          try {
            f(i);
          } catch (...) {
            errors[w] = std::current_exception();
            failed_at[w] = i;
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    std::size_t first = nw;
    for (std::size_t w = 0; w < nw; ++w) {
      if (errors[w] && (first == nw || failed_at[w] < failed_at[first])) first = w;
    }
    if (first != nw) std::rethrow_exception(errors[first]);
  }

 private:
  int workers_;
};

}  // namespace enff
