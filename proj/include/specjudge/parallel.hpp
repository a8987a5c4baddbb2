// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <vector>

namespace specjudge {

// results[i] = fn(i) for i in [0, count), spread over `workers` threads with
// strided assignment. Output order never depends on the worker count.
template <typename Fn>
auto parallel_map(std::size_t count, int workers, Fn fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> results(count);
  const auto width = static_cast<std::size_t>(std::max(1, workers));
  if (width == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < width; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += width) results[i] = fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return results;
}

}  // namespace specjudge
