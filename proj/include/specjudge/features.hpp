// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "specjudge/ngram_model.hpp"

namespace specjudge {

using FeatureVector = std::vector<double>;

// Stand-in for target-model hidden states. Fixed slot layout:
//   [0] log p_target(token | prefix)
//   [1] log p_draft(token | prefix)
//   [2] entropy of the target distribution at this position
//   [3] rank of token under target, normalized to [0, 1]
//   [4] target top-1 log-prob minus token log-prob
//   [5] consulted context length / (target order - 1)
//   [6..] Gaussian projection of the one-hot (context, token) pair
// The projection matrix is drawn once at construction from `seed`. Contexts
// absent from the target count table share one extra column block.
class FeatureExtractor {
 public:
  static constexpr std::size_t kDefaultDim = 16;
  static constexpr std::size_t kFixedSlots = 6;
  static constexpr std::uint64_t kDefaultSeed = 42;

  // Both models must outlive the extractor.
  FeatureExtractor(const NGramModel& target, const NGramModel& draft,
                   std::size_t dim = kDefaultDim, std::uint64_t seed = kDefaultSeed);

  std::size_t dim() const noexcept { return dim_; }

  FeatureVector operator()(std::span<const TokenId> prefix, TokenId token) const;

 private:
  std::size_t column(std::span<const TokenId> context, TokenId token) const;

  const NGramModel* target_;
  const NGramModel* draft_;
  std::size_t dim_;
  std::map<TokenSeq, std::size_t> context_index_;
  // proj_[column * projected + slot]
  std::vector<double> proj_;
};

}  // namespace specjudge
