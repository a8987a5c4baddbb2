// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/semlabel.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "specjudge/error.hpp"
#include "specjudge/parallel.hpp"

namespace specjudge::semlabel {

namespace {

TokenSeq context_at(std::span<const TokenId> prompt, std::span<const TokenId> response,
                    std::size_t position) {
  TokenSeq ctx(prompt.begin(), prompt.end());
  ctx.insert(ctx.end(), response.begin(),
             response.begin() + static_cast<std::ptrdiff_t>(position));
  return ctx;
}

void check_record(std::span<const TokenId> response, const MismatchRecord& record) {
  if (record.position >= response.size()) fail("mismatch position outside response");
  if (response[record.position] != record.original) fail("mismatch record does not match response");
}

}  // namespace

TokenSeq generate_response(const NGramModel& target, std::span<const TokenId> prompt,
                           std::size_t max_len, TokenId stop_token) {
  if (max_len < 1) fail("max_len must be >= 1");
  return greedy_rollout(target, prompt, max_len, stop_token);
}

std::vector<MismatchRecord> find_mismatches(const NGramModel& draft,
                                            std::span<const TokenId> response,
                                            std::span<const TokenId> prompt, int prompt_id) {
  if (response.empty()) fail("response must be nonempty");
  std::vector<MismatchRecord> out;
  TokenSeq ctx(prompt.begin(), prompt.end());
  for (std::size_t i = 0; i < response.size(); ++i) {
    const TokenId z = draft.next_distribution(ctx).argmax();
    if (z != response[i]) out.push_back({prompt_id, i, response[i], z});
    ctx.push_back(response[i]);
  }
  return out;
}

ScoreBreakdown semantic_score(const NGramModel& target, std::span<const TokenId> prompt,
                              std::span<const TokenId> response, const MismatchRecord& record,
                              std::size_t suffix_len) {
  check_record(response, record);
  const std::size_t i = record.position;
  TokenSeq ctx = context_at(prompt, response, i);

  ScoreBreakdown b;
  b.s_prefix = std::log(target.prob(ctx, record.alternative)) -
               std::log(target.prob(ctx, record.original));
  b.n_used = std::min(suffix_len, response.size() - i - 1);
  if (b.n_used > 0) {
    const auto suffix = response.subspan(i + 1, b.n_used);
    // Both branches feed the full response with position i substituted.
    ctx.push_back(record.alternative);
    const double substituted = sequence_logprob(target, suffix, ctx);
    ctx.back() = record.original;
    const double original = sequence_logprob(target, suffix, ctx);
    b.suffix_delta = substituted - original;
  }
  b.s = b.s_prefix + b.suffix_delta;
  return b;
}

double calibrate_tau(std::span<const double> scores, double q) {
  if (scores.empty()) fail("no scores to calibrate tau");
  if (!(q > 0.0 && q < 1.0)) fail("quantile must be in (0,1)");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool oracle_unacceptable(const NGramModel& target, std::span<const TokenId> prompt,
                         std::span<const TokenId> response, const MismatchRecord& record,
                         std::size_t horizon) {
  check_record(response, record);
  if (horizon == 0) return false;
  TokenSeq ctx = context_at(prompt, response, record.position);
  ctx.push_back(record.original);
  const TokenSeq kept = greedy_rollout(target, ctx, horizon);
  ctx.back() = record.alternative;
  const TokenSeq swapped = greedy_rollout(target, ctx, horizon);
  return kept != swapped;
}

PromptScores score_prompt(const NGramModel& target, const NGramModel& draft,
                          const Prompt& prompt, const LabelConfig& config,
                          const BuildOptions& options) {
  PromptScores out;
  out.response =
      generate_response(target, prompt.tokens, options.max_response_len, options.stop_token);
  out.records = find_mismatches(draft, out.response, prompt.tokens, prompt.id);
  for (const auto& rec : out.records) {
    out.breakdowns.push_back(
        semantic_score(target, prompt.tokens, out.response, rec, config.suffix_len));
  }
  return out;
}

double calibrate_tau_from_oracle(const NGramModel& target, const NGramModel& draft,
                                 std::span<const Prompt> prompts, const LabelConfig& config,
                                 const BuildOptions& options) {
  auto per_prompt = parallel_map(prompts.size(), options.workers, [&](std::size_t i) {
    const auto scored = score_prompt(target, draft, prompts[i], config, options);
    std::vector<double> bad;
    for (std::size_t k = 0; k < scored.records.size(); ++k) {
      if (oracle_unacceptable(target, prompts[i].tokens, scored.response, scored.records[k],
                              config.horizon)) {
        bad.push_back(scored.breakdowns[k].s);
      }
    }
    return bad;
  });
  std::vector<double> unacceptable;
  for (const auto& v : per_prompt) unacceptable.insert(unacceptable.end(), v.begin(), v.end());
  if (unacceptable.empty()) fail(ErrorKind::kState, "no unacceptable mismatches to calibrate tau");
  return calibrate_tau(unacceptable, config.calibration_quantile);
}

Dataset build_dataset(const NGramModel& target, const NGramModel& draft,
                      const FeatureExtractor& features, std::span<const Prompt> prompts,
                      const LabelConfig& config, const BuildOptions& options) {
  auto per_prompt = parallel_map(prompts.size(), options.workers, [&](std::size_t i) {
    const Prompt& prompt = prompts[i];
    const auto scored = score_prompt(target, draft, prompt, config, options);
    std::vector<LabeledExample> examples;
    for (std::size_t k = 0; k < scored.records.size(); ++k) {
      const auto& rec = scored.records[k];
      LabeledExample ex;
      const TokenSeq ctx = context_at(prompt.tokens, scored.response, rec.position);
      ex.features = features(ctx, rec.alternative);
      ex.breakdown = scored.breakdowns[k];
      ex.label = ex.breakdown.s > config.tau;
      ex.meta = rec;
      examples.push_back(std::move(ex));
    }
    return examples;
  });

  Dataset out;
  out.summary.num_prompts = prompts.size();
  out.summary.tau = config.tau;
  out.summary.suffix_len = config.suffix_len;
  for (auto& batch : per_prompt) {
    for (auto& ex : batch) {
      out.summary.num_acceptable += ex.label ? 1 : 0;
      out.examples.push_back(std::move(ex));
    }
  }
  out.summary.num_mismatches = out.examples.size();
  return out;
}

std::string example_record(const LabeledExample& ex) {
  nlohmann::ordered_json rec;
  rec["prompt_id"] = ex.meta.prompt_id;
  rec["position"] = ex.meta.position;
  rec["y_i"] = ex.meta.original;
  rec["z_i"] = ex.meta.alternative;
  rec["s_prefix"] = ex.breakdown.s_prefix;
  rec["suffix_delta"] = ex.breakdown.suffix_delta;
  rec["s"] = ex.breakdown.s;
  rec["n_used"] = ex.breakdown.n_used;
  rec["label"] = ex.label;
  rec["features"] = ex.features;
  return rec.dump();
}

LabeledExample parse_example_record(const std::string& line) {
  try {
    const auto rec = nlohmann::json::parse(line);
    LabeledExample ex;
    ex.meta.prompt_id = rec.at("prompt_id").get<int>();
    ex.meta.position = rec.at("position").get<std::size_t>();
    ex.meta.original = rec.at("y_i").get<TokenId>();
    ex.meta.alternative = rec.at("z_i").get<TokenId>();
    ex.breakdown.s_prefix = rec.at("s_prefix").get<double>();
    ex.breakdown.suffix_delta = rec.at("suffix_delta").get<double>();
    ex.breakdown.s = rec.at("s").get<double>();
    ex.breakdown.n_used = rec.at("n_used").get<std::size_t>();
    ex.label = rec.at("label").get<bool>();
    ex.features = rec.at("features").get<FeatureVector>();
    return ex;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("dataset record: ") + e.what());
  }
}

}  // namespace specjudge::semlabel
