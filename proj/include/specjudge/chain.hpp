// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "specjudge/distribution.hpp"
#include "specjudge/vocab.hpp"

namespace specjudge {

// Explicit Markov chain whose next token depends on the previous
// `context_len` tokens. Used as analytic ground truth for the synthetic
// corpus. In n-gram terms a chain with context_len c is an order-(c+1) chain.
class MarkovChain {
 public:
  MarkovChain(std::size_t vocab_size, std::size_t context_len,
              std::vector<std::vector<double>> rows);

  // Rows are softmax(sharpness * g) with g ~ N(0, 1) drawn from `seed`.
  static MarkovChain random(std::size_t vocab_size, std::size_t context_len,
                            double sharpness, std::uint64_t seed);

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t context_len() const noexcept { return context_len_; }
  std::size_t num_contexts() const noexcept { return rows_.size(); }

  // Context index of the last context_len tokens (base-V, oldest first).
  std::size_t context_index(std::span<const TokenId> context) const;
  TokenSeq context_tokens(std::size_t index) const;
  const std::vector<double>& row(std::size_t context) const { return rows_[context]; }

  // First context_len tokens are uniform; the rest follow the chain.
  TokenSeq sample(std::size_t length, Rng& rng) const;
  std::vector<TokenSeq> sample_corpus(std::size_t num_sequences, std::size_t length,
                                      std::uint64_t seed) const;

  // Stationary distribution over contexts (power iteration).
  std::vector<double> stationary() const;
  // sum_ctx pi(ctx) H(row(ctx)) in nats.
  double entropy_rate() const;

 private:
  std::size_t vocab_size_;
  std::size_t context_len_;
  std::vector<std::vector<double>> rows_;
};

// Letters a, b, c, ... for up to 26 tokens, numbered tokens beyond that.
Vocab synthetic_vocab(std::size_t size);

}  // namespace specjudge
