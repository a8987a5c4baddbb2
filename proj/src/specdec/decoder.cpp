// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "specjudge/error.hpp"
#include "specjudge/specdec.hpp"

namespace specjudge::specdec {

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::kRejection: return "rejection";
    case PolicyKind::kGreedy: return "greedy";
    case PolicyKind::kTopK: return "topk:" + std::to_string(k);
    case PolicyKind::kJudge: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "judge@%.6g", theta);
      return buf;
    }
    case PolicyKind::kAcceptAll: return "accept-all";
  }
  return "?";
}

DraftProposal draft(const NGramModel& draft_model, std::span<const TokenId> prefix,
                    int gamma, double temperature, Rng& rng) {
  if (gamma < 1) fail("gamma must be >= 1");
  DraftProposal proposal;
  TokenSeq ctx(prefix.begin(), prefix.end());
  for (int i = 0; i < gamma; ++i) {
    Distribution dist = draft_model.next_distribution(ctx);
    TokenId tok;
    if (temperature == 0.0) {
      tok = dist.argmax();
    } else {
      dist = apply_temperature(dist, temperature);
      tok = sample_with_uniform(dist, uniform01(rng));
    }
    proposal.tokens.push_back(tok);
    proposal.q.push_back(dist[tok]);
    proposal.q_full.push_back(std::move(dist));
    ctx.push_back(tok);
  }
  return proposal;
}

TargetScores target_scores(const NGramModel& target, std::span<const TokenId> prefix,
                           std::span<const TokenId> draft_tokens,
                           const FeatureExtractor* features) {
  if (draft_tokens.empty()) fail("draft must be nonempty");
  TargetScores out;
  TokenSeq ctx(prefix.begin(), prefix.end());
  for (std::size_t j = 0; j <= draft_tokens.size(); ++j) {
    out.dists.push_back(target.next_distribution(ctx));
    if (j == draft_tokens.size()) break;
    if (features) out.features.push_back((*features)(ctx, draft_tokens[j]));
    ctx.push_back(draft_tokens[j]);
  }
  return out;
}

namespace {

// Verification never runs past an accepted stop token: the stop becomes the
// cycle's final emitted token.
void truncate_at_stop(VerificationTrace& trace, TokenId stop) {
  if (stop < 0) return;
  for (int j = 0; j < trace.accepted_count; ++j) {
    if (trace.draft_tokens[static_cast<std::size_t>(j)] != stop) continue;
    trace.accepted_count = j;
    trace.emitted.resize(static_cast<std::size_t>(j) + 1);
    trace.correction_source = CorrectionSource::kStop;
    for (std::size_t t = static_cast<std::size_t>(j) + 1; t < trace.decisions.size(); ++t) {
      trace.decisions[t] = Decision::kSkipped;
    }
    return;
  }
}

}  // namespace

SpeculativeDecoder::SpeculativeDecoder(const NGramModel& target, const NGramModel& draft)
    : target_(&target), draft_(&draft), features_(target, draft) {
  if (!(target.vocab() == draft.vocab())) fail("target and draft vocabularies differ");
}

VerificationTrace SpeculativeDecoder::cycle(std::span<const TokenId> prefix,
                                            const DecodeConfig& config, Rng& rng) const {
  const double temp = config.temperature;
  const Policy& policy = config.policy;
  const bool judged = policy.kind == PolicyKind::kJudge;
  if (judged && policy.judge == nullptr) fail("judge policy requires a verifier");

  DraftProposal proposal = draft(*draft_, prefix, config.gamma, temp, rng);
  TargetScores scores =
      target_scores(*target_, prefix, proposal.tokens, judged ? &features_ : nullptr);
  const CycleUniforms uniforms = draw_uniforms(rng, config.gamma);
  if (temp > 0.0) {
    for (auto& d : scores.dists) d = apply_temperature(d, temp);
  }

  VerificationTrace trace;
  switch (policy.kind) {
    case PolicyKind::kRejection:
      trace = verify_rejection(scores.dists, proposal, uniforms, temp);
      break;
    case PolicyKind::kGreedy:
      trace = verify_greedy(scores.dists, proposal.tokens);
      break;
    case PolicyKind::kTopK:
      trace = verify_topk(scores.dists, proposal.tokens, policy.k);
      break;
    case PolicyKind::kJudge:
      trace = verify_judge_two_stage(scores.features, scores.dists, proposal, *policy.judge,
                                     policy.theta, uniforms, temp);
      break;
    case PolicyKind::kAcceptAll:
      trace = verify_accept_all(scores.dists, proposal, uniforms, temp);
      break;
  }
  trace.q = proposal.q;
  trace.u = uniforms.u;
  truncate_at_stop(trace, config.stop_token);
  return trace;
}

DecodeResult SpeculativeDecoder::decode(std::span<const TokenId> prompt,
                                        const DecodeConfig& config) const {
  if (config.gamma < 1) fail("gamma must be >= 1");
  if (config.max_new_tokens < 1) fail("max_new_tokens must be >= 1");
  if (!(config.temperature >= 0.0)) fail("temperature must be >= 0");
  for (TokenId t : prompt) {
    if (!target_->vocab().contains(t)) fail("unknown token");
  }

  DecodeResult result;
  TokenSeq ctx(prompt.begin(), prompt.end());
  Rng rng(config.seed);
  const auto budget = static_cast<std::size_t>(config.max_new_tokens);
  bool stopped = false;
  while (result.tokens.size() < budget && !stopped) {
    VerificationTrace trace = cycle(ctx, config, rng);
    for (TokenId tok : trace.emitted) {
      if (result.tokens.size() >= budget) break;
      result.tokens.push_back(tok);
      ctx.push_back(tok);
      if (tok == config.stop_token) {
        stopped = true;
        break;
      }
    }
    result.traces.push_back(std::move(trace));
  }
  result.metrics = summarize(result.traces, static_cast<int>(result.tokens.size()));
  return result;
}

DecodeMetrics summarize(std::span<const VerificationTrace> traces, int total_emitted) {
  DecodeMetrics m;
  m.cycles = static_cast<int>(traces.size());
  m.total_emitted = total_emitted;
  for (const auto& t : traces) m.total_accepted += t.accepted_count;
  if (m.cycles > 0) {
    m.mean_accepted_draft = static_cast<double>(m.total_accepted) / m.cycles;
    m.mean_emitted_per_cycle = m.mean_accepted_draft + 1.0;
  }
  return m;
}

std::string trace_record(const VerificationTrace& trace, int prompt_id, int cycle,
                         const std::string& policy) {
  nlohmann::ordered_json rec;
  if (!policy.empty()) rec["policy"] = policy;
  rec["prompt_id"] = prompt_id;
  rec["cycle"] = cycle;
  rec["accepted_count"] = trace.accepted_count;
  rec["correction_source"] = to_string(trace.correction_source);
  rec["residual_fallback"] = trace.residual_fallback;
  rec["emitted"] = trace.emitted;
  auto positions = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < trace.draft_tokens.size(); ++t) {
    nlohmann::ordered_json pos;
    pos["token"] = trace.draft_tokens[t];
    pos["p"] = trace.p[t][trace.draft_tokens[t]];
    pos["q"] = trace.q[t];
    pos["u"] = trace.u[t];
    pos["r"] = trace.r[t];  // NaN serializes as null
    pos["judge_score"] = trace.judge_scores.empty()
                             ? nlohmann::ordered_json(nullptr)
                             : nlohmann::ordered_json(trace.judge_scores[t]);
    pos["decision"] = to_string(trace.decisions[t]);
    positions.push_back(std::move(pos));
  }
  rec["positions"] = std::move(positions);
  return rec.dump();
}

}  // namespace specjudge::specdec
