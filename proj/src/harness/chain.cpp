// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/chain.hpp"

#include <cmath>

#include "specjudge/error.hpp"

namespace specjudge {

MarkovChain::MarkovChain(std::size_t vocab_size, std::size_t context_len,
                         std::vector<std::vector<double>> rows)
    : vocab_size_(vocab_size), context_len_(context_len), rows_(std::move(rows)) {
  if (vocab_size_ < 2) fail("chain needs at least 2 symbols");
  std::size_t expected = 1;
  for (std::size_t i = 0; i < context_len_; ++i) expected *= vocab_size_;
  if (rows_.size() != expected) fail("chain needs V^context_len rows");
  for (const auto& r : rows_) {
    if (r.size() != vocab_size_) fail("chain row has wrong width");
    double s = 0.0;
    for (double p : r) {
      if (!(p >= 0.0)) fail("chain probabilities must be >= 0");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) fail("chain row does not sum to 1");
  }
}

MarkovChain MarkovChain::random(std::size_t vocab_size, std::size_t context_len,
                                double sharpness, std::uint64_t seed) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < context_len; ++i) count *= vocab_size;
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> rows(count, std::vector<double>(vocab_size));
  for (auto& row : rows) {
    double total = 0.0;
    for (double& p : row) {
      p = std::exp(sharpness * gauss(rng));
      total += p;
    }
    for (double& p : row) p /= total;
  }
  return MarkovChain(vocab_size, context_len, std::move(rows));
}

std::size_t MarkovChain::context_index(std::span<const TokenId> context) const {
  if (context.size() < context_len_) fail("context shorter than chain context length");
  std::size_t idx = 0;
  for (std::size_t i = context.size() - context_len_; i < context.size(); ++i) {
    idx = idx * vocab_size_ + static_cast<std::size_t>(context[i]);
  }
  return idx;
}

TokenSeq MarkovChain::context_tokens(std::size_t index) const {
  TokenSeq ctx(context_len_);
  for (std::size_t i = context_len_; i-- > 0;) {
    ctx[i] = static_cast<TokenId>(index % vocab_size_);
    index /= vocab_size_;
  }
  return ctx;
}

TokenSeq MarkovChain::sample(std::size_t length, Rng& rng) const {
  TokenSeq seq;
  seq.reserve(length);
  while (seq.size() < length) {
    if (seq.size() < context_len_) {
      seq.push_back(static_cast<TokenId>(rng() % vocab_size_));
      continue;
    }
    const Distribution row{rows_[context_index(seq)]};
    seq.push_back(sample_with_uniform(row, uniform01(rng)));
  }
  return seq;
}

std::vector<TokenSeq> MarkovChain::sample_corpus(std::size_t num_sequences, std::size_t length,
                                                 std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<TokenSeq> corpus;
  corpus.reserve(num_sequences);
  for (std::size_t i = 0; i < num_sequences; ++i) corpus.push_back(sample(length, rng));
  return corpus;
}

std::vector<double> MarkovChain::stationary() const {
  const std::size_t n = rows_.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int iter = 0; iter < 10000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      // Successor context drops the oldest token and appends v.
      const std::size_t shifted = context_len_ == 0 ? 0 : (c * vocab_size_) % n;
      for (std::size_t v = 0; v < vocab_size_; ++v) {
        const std::size_t succ = context_len_ == 0 ? 0 : shifted + v;
        next[succ] += pi[c] * rows_[c][v];
      }
    }
    double diff = 0.0;
    for (std::size_t c = 0; c < n; ++c) diff += std::abs(next[c] - pi[c]);
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  return pi;
}

double MarkovChain::entropy_rate() const {
  const auto pi = stationary();
  double h = 0.0;
  for (std::size_t c = 0; c < rows_.size(); ++c) {
    h += pi[c] * Distribution{rows_[c]}.entropy();
  }
  return h;
}

Vocab synthetic_vocab(std::size_t size) {
  if (size > 26) return Vocab::numbered(size);
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < size; ++i) tokens.emplace_back(1, static_cast<char>('a' + i));
  return Vocab(std::move(tokens));
}

}  // namespace specjudge
