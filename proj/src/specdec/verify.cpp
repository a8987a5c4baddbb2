// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "specjudge/error.hpp"
#include "specjudge/specdec.hpp"

namespace specjudge::specdec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VerificationTrace start_trace(std::span<const Distribution> p,
                              std::span<const TokenId> draft_tokens) {
  const std::size_t gamma = draft_tokens.size();
  if (gamma == 0) fail("draft must be nonempty");
  if (p.size() != gamma + 1) fail("need gamma + 1 target distributions");
  VerificationTrace trace;
  trace.p.assign(p.begin(), p.end());
  trace.draft_tokens.assign(draft_tokens.begin(), draft_tokens.end());
  trace.q.assign(gamma, kNaN);
  trace.u.assign(gamma, kNaN);
  trace.r.assign(gamma, kNaN);
  trace.decisions.assign(gamma, Decision::kSkipped);
  return trace;
}

void check_proposal(const DraftProposal& proposal, const CycleUniforms& uniforms) {
  const std::size_t gamma = proposal.tokens.size();
  if (proposal.q.size() != gamma || proposal.q_full.size() != gamma) {
    fail("draft proposal lengths differ");
  }
  if (uniforms.u.size() != gamma) fail("need one uniform per draft position");
}

void record_inputs(VerificationTrace& trace, const DraftProposal& proposal,
                   const CycleUniforms& uniforms) {
  trace.q = proposal.q;
  trace.u = uniforms.u;
}

double acceptance_ratio(const Distribution& p, TokenId token, double q) {
  return std::min(1.0, p[token] / q);
}

bool alignment_accepts(const VerificationTrace& trace, std::size_t t, double temperature) {
  if (temperature == 0.0) return trace.draft_tokens[t] == trace.p[t].argmax();
  return trace.u[t] < trace.r[t];
}

// Correction token after an alignment rejection at position t.
void correct(VerificationTrace& trace, std::size_t t, const Distribution& q_full,
             double u, double temperature) {
  const Distribution& p = trace.p[t];
  if (temperature == 0.0) {
    trace.emitted.push_back(p.argmax());
    trace.correction_source = CorrectionSource::kArgmax;
    return;
  }
  Distribution residual{std::vector<double>(p.size())};
  double mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    residual.probs[i] = std::max(0.0, p.probs[i] - q_full.probs[i]);
    mass += residual.probs[i];
  }
  if (!(mass > 0.0)) {
    trace.residual_fallback = true;
    residual = p;
  } else {
    for (double& v : residual.probs) v /= mass;
  }
  trace.emitted.push_back(sample_with_uniform(residual, u));
  trace.correction_source = CorrectionSource::kResidual;
}

void bonus(VerificationTrace& trace, double u, double temperature) {
  const Distribution& last = trace.p.back();
  trace.emitted.push_back(temperature == 0.0 ? last.argmax() : sample_with_uniform(last, u));
  trace.correction_source = CorrectionSource::kBonus;
}

void accept(VerificationTrace& trace, std::size_t t, Decision how) {
  trace.decisions[t] = how;
  trace.emitted.push_back(trace.draft_tokens[t]);
  ++trace.accepted_count;
}

// Shared scan for the deterministic policies.
template <typename Accepts>
VerificationTrace verify_deterministic(std::span<const Distribution> p,
                                       std::span<const TokenId> draft_tokens, Accepts accepts) {
  auto trace = start_trace(p, draft_tokens);
  for (std::size_t t = 0; t < draft_tokens.size(); ++t) {
    if (accepts(p[t], draft_tokens[t])) {
      accept(trace, t, Decision::kAccept);
      continue;
    }
    trace.decisions[t] = Decision::kReject;
    trace.emitted.push_back(p[t].argmax());
    trace.correction_source = CorrectionSource::kArgmax;
    return trace;
  }
  trace.emitted.push_back(p.back().argmax());
  trace.correction_source = CorrectionSource::kBonus;
  return trace;
}

}  // namespace

std::size_t strict_rank(const Distribution& dist, TokenId token) {
  const double target = dist[token];
  std::size_t rank = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double v = dist.probs[i];
    if (v > target || (v == target && static_cast<TokenId>(i) < token)) ++rank;
  }
  return rank;
}

CycleUniforms draw_uniforms(Rng& rng, int gamma) {
  CycleUniforms out;
  out.u.reserve(static_cast<std::size_t>(gamma));
  for (int i = 0; i < gamma; ++i) out.u.push_back(uniform01(rng));
  out.correction = uniform01(rng);
  return out;
}

VerificationTrace verify_rejection(std::span<const Distribution> p,
                                   const DraftProposal& proposal,
                                   const CycleUniforms& uniforms, double temperature) {
  check_proposal(proposal, uniforms);
  auto trace = start_trace(p, proposal.tokens);
  record_inputs(trace, proposal, uniforms);
  for (std::size_t t = 0; t < proposal.tokens.size(); ++t) {
    trace.r[t] = acceptance_ratio(p[t], proposal.tokens[t], proposal.q[t]);
    if (alignment_accepts(trace, t, temperature)) {
      accept(trace, t, Decision::kAccept);
      continue;
    }
    trace.decisions[t] = Decision::kReject;
    correct(trace, t, proposal.q_full[t], uniforms.correction, temperature);
    return trace;
  }
  bonus(trace, uniforms.correction, temperature);
  return trace;
}

VerificationTrace verify_greedy(std::span<const Distribution> p,
                                std::span<const TokenId> draft_tokens) {
  return verify_deterministic(p, draft_tokens, [](const Distribution& dist, TokenId tok) {
    return tok == dist.argmax();
  });
}

VerificationTrace verify_topk(std::span<const Distribution> p,
                              std::span<const TokenId> draft_tokens, int k) {
  if (k < 1) fail("k must be >= 1");
  if (!p.empty() && static_cast<std::size_t>(k) > p.front().size()) fail("k exceeds vocab size");
  return verify_deterministic(p, draft_tokens, [k](const Distribution& dist, TokenId tok) {
    return strict_rank(dist, tok) < static_cast<std::size_t>(k);
  });
}

VerificationTrace verify_judge_two_stage(std::span<const FeatureVector> features,
                                         std::span<const Distribution> p,
                                         const DraftProposal& proposal,
                                         const judge::JudgeModel& judge, double theta,
                                         const CycleUniforms& uniforms, double temperature) {
  check_proposal(proposal, uniforms);
  if (features.size() != proposal.tokens.size()) fail("need one feature vector per draft token");
  if (std::isnan(theta)) fail("theta must not be NaN");
  auto trace = start_trace(p, proposal.tokens);
  record_inputs(trace, proposal, uniforms);
  // Stage one scores every draft position at once.
  trace.judge_scores.reserve(features.size());
  for (const auto& f : features) trace.judge_scores.push_back(judge.predict_proba(f));

  for (std::size_t t = 0; t < proposal.tokens.size(); ++t) {
    if (trace.judge_scores[t] > theta) {
      accept(trace, t, Decision::kJudgeAccept);
      continue;
    }
    trace.r[t] = acceptance_ratio(p[t], proposal.tokens[t], proposal.q[t]);
    if (alignment_accepts(trace, t, temperature)) {
      accept(trace, t, Decision::kAccept);
      continue;
    }
    trace.decisions[t] = Decision::kReject;
    correct(trace, t, proposal.q_full[t], uniforms.correction, temperature);
    return trace;
  }
  bonus(trace, uniforms.correction, temperature);
  return trace;
}

VerificationTrace verify_accept_all(std::span<const Distribution> p,
                                    const DraftProposal& proposal,
                                    const CycleUniforms& uniforms, double temperature) {
  check_proposal(proposal, uniforms);
  auto trace = start_trace(p, proposal.tokens);
  record_inputs(trace, proposal, uniforms);
  for (std::size_t t = 0; t < proposal.tokens.size(); ++t) accept(trace, t, Decision::kAccept);
  bonus(trace, uniforms.correction, temperature);
  return trace;
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::kAccept: return "accept";
    case Decision::kJudgeAccept: return "judge_accept";
    case Decision::kReject: return "reject";
    case Decision::kSkipped: return "skipped";
  }
  return "?";
}

const char* to_string(CorrectionSource s) {
  switch (s) {
    case CorrectionSource::kResidual: return "residual";
    case CorrectionSource::kBonus: return "bonus";
    case CorrectionSource::kArgmax: return "argmax";
    case CorrectionSource::kStop: return "stop";
  }
  return "?";
}

}  // namespace specjudge::specdec
