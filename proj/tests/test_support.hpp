// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and independent oracles for the test binaries. The oracles
// recompute quantities from raw counts or by brute force and deliberately do
// not call the library routines they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "specjudge/chain.hpp"
#include "specjudge/distribution.hpp"
#include "specjudge/judge.hpp"
#include "specjudge/ngram_model.hpp"

namespace sjtest {

using specjudge::NGramModel;
using specjudge::TokenId;
using specjudge::TokenSeq;

// Smoothed probability straight from the count table.
inline double oracle_prob(const NGramModel& m, const TokenSeq& prefix, TokenId token) {
  const std::size_t keep = std::min<std::size_t>(prefix.size(), static_cast<std::size_t>(m.order() - 1));
  const TokenSeq ctx(prefix.end() - static_cast<std::ptrdiff_t>(keep), prefix.end());
  const double v = static_cast<double>(m.vocab_size());
  double count = 0.0, total = 0.0;
  if (auto it = m.counts().find(ctx); it != m.counts().end()) {
    total = static_cast<double>(it->second.total);
    count = static_cast<double>(it->second.counts[static_cast<std::size_t>(token)]);
  }
  return (count + m.alpha()) / (total + m.alpha() * v);
}

inline double oracle_logprob(const NGramModel& m, TokenSeq prefix, const TokenSeq& cont) {
  double s = 0.0;
  for (TokenId t : cont) {
    s += std::log(oracle_prob(m, prefix, t));
    prefix.push_back(t);
  }
  return s;
}

// Posterior of the token at `pos` given the whole prompt + response, by
// enumerating that slot. Returns log P(z | both sides) - log P(y_pos | both).
inline double oracle_bidirectional_score(const NGramModel& m, const TokenSeq& prompt,
                                         const TokenSeq& response, std::size_t pos, TokenId z) {
  const std::size_t v = m.vocab_size();
  std::vector<double> log_joint(v);
  for (std::size_t w = 0; w < v; ++w) {
    TokenSeq alt = response;
    alt[pos] = static_cast<TokenId>(w);
    log_joint[w] = oracle_logprob(m, prompt, alt);
  }
  const double mx = *std::max_element(log_joint.begin(), log_joint.end());
  double norm = 0.0;
  for (double lj : log_joint) norm += std::exp(lj - mx);
  const double log_norm = mx + std::log(norm);
  return (log_joint[static_cast<std::size_t>(z)] - log_norm) -
         (log_joint[static_cast<std::size_t>(response[pos])] - log_norm);
}

inline TokenId oracle_argmax(const std::vector<double>& p) {
  TokenId best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[static_cast<std::size_t>(best)]) best = static_cast<TokenId>(i);
  }
  return best;
}

// Tokens ordered by probability descending, ties to the lower id.
inline std::vector<TokenId> oracle_sorted_tokens(const std::vector<double>& p) {
  std::vector<TokenId> ids(p.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<TokenId>(i);
  std::stable_sort(ids.begin(), ids.end(), [&](TokenId a, TokenId b) {
    return p[static_cast<std::size_t>(a)] > p[static_cast<std::size_t>(b)];
  });
  return ids;
}

// Target/draft pair trained on a seeded chain corpus.
struct ModelPair {
  specjudge::MarkovChain chain;
  NGramModel target;
  NGramModel draft;
};

inline ModelPair make_pair(std::size_t vocab, std::size_t chain_ctx, double sharpness,
                           std::uint64_t seed, std::size_t sequences, std::size_t length,
                           int target_order = 3, int draft_order = 2, double alpha = 0.5) {
  auto chain = specjudge::MarkovChain::random(vocab, chain_ctx, sharpness, seed);
  const auto corpus = chain.sample_corpus(sequences, length, seed + 1000);
  const auto v = specjudge::synthetic_vocab(vocab);
  auto target = NGramModel::train(v, corpus, target_order, alpha);
  auto draft = NGramModel::train(v, corpus, draft_order, alpha);
  return {std::move(chain), std::move(target), std::move(draft)};
}

// ROC-AUC by counting all positive/negative pairs, ties worth one half.
inline double oracle_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double num = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1.0;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / pairs;
}

// Gaussian features with random labels; both classes always present.
inline specjudge::judge::TrainingSet random_problem(std::mt19937_64& rng, std::size_t n,
                                                    std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  specjudge::judge::TrainingSet data;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(d);
    for (auto& v : x) v = g(rng);
    data.x.push_back(std::move(x));
    data.y.push_back(static_cast<std::uint8_t>(rng() % 2));
  }
  data.y[0] = 0;
  data.y[1] = 1;
  return data;
}

// Labels from a planted linear rule on slots 0, 3 and 7 of standard-normal
// features. Noise is Gaussian with 10% of the rule's standard deviation.
inline specjudge::judge::TrainingSet planted_data(std::size_t n, std::uint64_t seed,
                                                  std::size_t dim = 16) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const double w0 = 2.0, w3 = -1.5, w7 = 1.0;
  const double rule_sd = std::sqrt(w0 * w0 + w3 * w3 + w7 * w7);
  specjudge::judge::TrainingSet data;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    for (auto& v : x) v = g(rng);
    const double score = w0 * x[0] + w3 * x[3] + w7 * x[7] + 0.3;
    data.y.push_back(score + 0.1 * rule_sd * g(rng) > 0.0 ? 1 : 0);
    data.x.push_back(std::move(x));
  }
  return data;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("specjudge_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::FILE* f = std::fopen(p.string().c_str(), "rb");
  if (!f) return {};
  std::string out;
  char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  std::fclose(f);
  return out;
}

}  // namespace sjtest
