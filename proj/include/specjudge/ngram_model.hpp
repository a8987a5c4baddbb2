// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "specjudge/distribution.hpp"
#include "specjudge/vocab.hpp"

namespace specjudge {

struct ContextCounts {
  std::vector<std::uint64_t> counts;  // one per vocab token
  std::uint64_t total = 0;
};

// Keyed by context tuple. Contexts of every length 0..order-1 are stored so
// short prefixes can back off to the longest available context.
using CountTable = std::map<TokenSeq, ContextCounts>;

// Additively smoothed count-based language model:
//   P(v | ctx) = (count(ctx, v) + alpha) / (total(ctx) + alpha * V)
// where ctx is the last min(|prefix|, order-1) tokens of the prefix.
// Immutable after construction.
class NGramModel {
 public:
  static constexpr int kFormatVersion = 1;

  NGramModel(Vocab vocab, int order, double alpha, CountTable counts);

  static NGramModel train(const Vocab& vocab, std::span<const TokenSeq> corpus,
                          int order, double alpha);

  int order() const noexcept { return order_; }
  double alpha() const noexcept { return alpha_; }
  const Vocab& vocab() const noexcept { return vocab_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  const CountTable& counts() const noexcept { return counts_; }

  // The context actually consulted for `prefix`.
  std::span<const TokenId> context_of(std::span<const TokenId> prefix) const;

  Distribution next_distribution(std::span<const TokenId> prefix) const;
  double prob(std::span<const TokenId> prefix, TokenId token) const;

  // Structured-text form; `config` (may be null JSON) is echoed verbatim.
  std::string serialize(const std::string& config_json = "null") const;
  static NGramModel deserialize(const std::string& text);

  void save(const std::filesystem::path& path,
            const std::string& config_json = "null") const;
  static NGramModel load(const std::filesystem::path& path);

 private:
  const ContextCounts* lookup(std::span<const TokenId> context) const;

  Vocab vocab_;
  int order_;
  double alpha_;
  CountTable counts_;
};

// Sum over continuation positions of log P(token | prefix + earlier tokens).
double sequence_logprob(const NGramModel& model,
                        std::span<const TokenId> continuation,
                        std::span<const TokenId> prefix);

// Greedy (temperature 0) rollout of `length` tokens.
TokenSeq greedy_rollout(const NGramModel& model, std::span<const TokenId> prefix,
                        std::size_t length, TokenId stop_token = -1);

}  // namespace specjudge
