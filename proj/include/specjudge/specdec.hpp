// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "specjudge/distribution.hpp"
#include "specjudge/features.hpp"
#include "specjudge/judge.hpp"
#include "specjudge/ngram_model.hpp"

namespace specjudge::specdec {

enum class PolicyKind {
  kRejection,  // modified rejection sampling (argmax match at temperature 0)
  kGreedy,     // strict match against the target argmax
  kTopK,       // draft token within the target top-k
  kJudge,      // judge first, rejection sampling as fallback
  kAcceptAll,  // negative control: accepts every draft token
};

struct Policy {
  PolicyKind kind = PolicyKind::kRejection;
  int k = 1;
  double theta = std::numeric_limits<double>::infinity();
  const judge::JudgeModel* judge = nullptr;

  std::string name() const;
};

struct DecodeConfig {
  int gamma = 6;
  int max_new_tokens = 64;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  Policy policy;
  TokenId stop_token = -1;  // -1: no stop token
};

struct DraftProposal {
  TokenSeq tokens;
  // Probability of each drafted token: tempered at temperature > 0, raw draft
  // probability at temperature 0.
  std::vector<double> q;
  // Full draft distributions (tempered) used for the residual.
  std::vector<Distribution> q_full;
};

// Per-cycle randomness: one u per drafted position, plus one uniform for the
// correction/bonus draw. Drawn for every policy so runs stay paired.
struct CycleUniforms {
  std::vector<double> u;
  double correction = 0.0;
};

CycleUniforms draw_uniforms(Rng& rng, int gamma);

enum class Decision { kAccept, kJudgeAccept, kReject, kSkipped };
enum class CorrectionSource { kResidual, kBonus, kArgmax, kStop };

const char* to_string(Decision d);
const char* to_string(CorrectionSource s);

struct VerificationTrace {
  std::vector<Distribution> p;   // gamma + 1 target distributions
  TokenSeq draft_tokens;
  std::vector<double> q;
  std::vector<double> u;
  std::vector<double> r;         // NaN where alignment verification did not run
  std::vector<double> judge_scores;  // empty unless the judge ran
  std::vector<Decision> decisions;
  int accepted_count = 0;
  TokenSeq emitted;              // accepted drafts + one correction/bonus token
  CorrectionSource correction_source = CorrectionSource::kBonus;
  bool residual_fallback = false;  // residual was all-zero; target used instead
};

struct DecodeMetrics {
  int cycles = 0;
  int total_emitted = 0;
  long long total_accepted = 0;
  double mean_accepted_draft = 0.0;
  double mean_emitted_per_cycle = 0.0;  // m
};

struct TargetScores {
  std::vector<Distribution> dists;       // gamma + 1, untempered
  std::vector<FeatureVector> features;   // gamma, empty if not requested
};

// Autoregressive drafting of `gamma` tokens.
DraftProposal draft(const NGramModel& draft_model, std::span<const TokenId> prefix,
                    int gamma, double temperature, Rng& rng);

TargetScores target_scores(const NGramModel& target, std::span<const TokenId> prefix,
                           std::span<const TokenId> draft_tokens,
                           const FeatureExtractor* features = nullptr);

// `p` holds gamma + 1 target distributions, already tempered when
// temperature > 0.
VerificationTrace verify_rejection(std::span<const Distribution> p,
                                   const DraftProposal& proposal,
                                   const CycleUniforms& uniforms, double temperature);

VerificationTrace verify_greedy(std::span<const Distribution> p,
                                std::span<const TokenId> draft_tokens);

VerificationTrace verify_topk(std::span<const Distribution> p,
                              std::span<const TokenId> draft_tokens, int k);

VerificationTrace verify_judge_two_stage(std::span<const FeatureVector> features,
                                         std::span<const Distribution> p,
                                         const DraftProposal& proposal,
                                         const judge::JudgeModel& judge, double theta,
                                         const CycleUniforms& uniforms, double temperature);

VerificationTrace verify_accept_all(std::span<const Distribution> p,
                                    const DraftProposal& proposal,
                                    const CycleUniforms& uniforms, double temperature);

// Position of `token` when tokens are sorted by probability descending with
// ties going to the lower id.
std::size_t strict_rank(const Distribution& dist, TokenId token);

struct DecodeResult {
  TokenSeq tokens;
  DecodeMetrics metrics;
  std::vector<VerificationTrace> traces;
};

// Drafting, target scoring and verification loop. Models must outlive the
// decoder; a decoder is safe to share across threads.
class SpeculativeDecoder {
 public:
  SpeculativeDecoder(const NGramModel& target, const NGramModel& draft);

  const NGramModel& target() const noexcept { return *target_; }
  const NGramModel& draft_model() const noexcept { return *draft_; }
  const FeatureExtractor& features() const noexcept { return features_; }

  DecodeResult decode(std::span<const TokenId> prompt, const DecodeConfig& config) const;

  // One cycle from `prefix` with the given rng; exposed for paired runs.
  VerificationTrace cycle(std::span<const TokenId> prefix, const DecodeConfig& config,
                          Rng& rng) const;

 private:
  const NGramModel* target_;
  const NGramModel* draft_;
  FeatureExtractor features_;
};

// Aggregates per-cycle traces; `total_emitted` is passed separately since the
// final cycle may be truncated at the budget.
DecodeMetrics summarize(std::span<const VerificationTrace> traces, int total_emitted);

// One line-delimited JSON record per cycle; `policy` is included when set.
std::string trace_record(const VerificationTrace& trace, int prompt_id, int cycle,
                         const std::string& policy = "");

}  // namespace specjudge::specdec
