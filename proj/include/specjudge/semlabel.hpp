// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "specjudge/features.hpp"
#include "specjudge/ngram_model.hpp"

namespace specjudge::semlabel {

// A response position where the draft argmax disagrees with the target token.
struct MismatchRecord {
  int prompt_id = 0;
  std::size_t position = 0;  // index into the response y
  TokenId original = 0;      // y_i
  TokenId alternative = 0;   // z_i, the draft argmax given prompt + y_<i
};

struct ScoreBreakdown {
  double s_prefix = 0.0;
  double suffix_delta = 0.0;
  double s = 0.0;
  std::size_t n_used = 0;
};

struct LabelConfig {
  std::size_t suffix_len = 20;  // N
  double tau = 0.0;
  double calibration_quantile = 0.1;
  std::size_t horizon = 8;      // oracle_unacceptable look-ahead H
};

struct LabeledExample {
  FeatureVector features;  // h_z
  ScoreBreakdown breakdown;
  bool label = false;      // acceptable iff breakdown.s > tau
  MismatchRecord meta;
};

// Greedy rollout of the target model.
TokenSeq generate_response(const NGramModel& target, std::span<const TokenId> prompt,
                           std::size_t max_len, TokenId stop_token = -1);

std::vector<MismatchRecord> find_mismatches(const NGramModel& draft,
                                            std::span<const TokenId> response,
                                            std::span<const TokenId> prompt,
                                            int prompt_id = 0);

// s = s_prefix + suffix_delta with
//   s_prefix     = log P(z | ctx) - log P(y_i | ctx)
//   suffix_delta = log P(y_{i+1..i+n} | ctx, z) - log P(y_{i+1..i+n} | ctx, y_i)
// where ctx = prompt + y_<i and n = min(N, |y| - i - 1).
ScoreBreakdown semantic_score(const NGramModel& target, std::span<const TokenId> prompt,
                              std::span<const TokenId> response, const MismatchRecord& record,
                              std::size_t suffix_len);

// The log Bayes factor carried by the suffix.
inline double bayes_factor(const ScoreBreakdown& b) { return b.suffix_delta; }

// q-quantile with linear interpolation between order statistics.
double calibrate_tau(std::span<const double> scores, double q);

// True iff substituting z_i for y_i changes the target's greedy continuation
// within the next `horizon` tokens.
bool oracle_unacceptable(const NGramModel& target, std::span<const TokenId> prompt,
                         std::span<const TokenId> response, const MismatchRecord& record,
                         std::size_t horizon);

struct Prompt {
  int id = 0;
  TokenSeq tokens;
};

struct DatasetSummary {
  std::size_t num_prompts = 0;
  std::size_t num_mismatches = 0;
  std::size_t num_acceptable = 0;
  double tau = 0.0;
  std::size_t suffix_len = 0;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  DatasetSummary summary;
};

struct BuildOptions {
  std::size_t max_response_len = 64;
  TokenId stop_token = -1;
  int workers = 1;
};

// Scored mismatches for one prompt, before labeling.
struct PromptScores {
  TokenSeq response;
  std::vector<MismatchRecord> records;
  std::vector<ScoreBreakdown> breakdowns;
};

PromptScores score_prompt(const NGramModel& target, const NGramModel& draft,
                          const Prompt& prompt, const LabelConfig& config,
                          const BuildOptions& options);

// Calibrates tau as the configured quantile of scores of mismatches the
// greedy-divergence oracle marks unacceptable. Throws if there are none.
double calibrate_tau_from_oracle(const NGramModel& target, const NGramModel& draft,
                                 std::span<const Prompt> prompts, const LabelConfig& config,
                                 const BuildOptions& options);

// Per-prompt work fans out over `options.workers`; results merge in prompt
// order so the output does not depend on the worker count.
Dataset build_dataset(const NGramModel& target, const NGramModel& draft,
                      const FeatureExtractor& features, std::span<const Prompt> prompts,
                      const LabelConfig& config, const BuildOptions& options);

std::string example_record(const LabeledExample& example);
LabeledExample parse_example_record(const std::string& line);

}  // namespace specjudge::semlabel
