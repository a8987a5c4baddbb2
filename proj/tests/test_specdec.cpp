// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>

#include "doctest.h"
#include "json.hpp"
#include "specjudge/error.hpp"
#include "specjudge/specdec.hpp"
#include "test_support.hpp"

using namespace specjudge;
using namespace specjudge::specdec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hand-built distributions over two tokens where token 0 has probability p0.
Distribution two(double p0) { return Distribution{{p0, 1.0 - p0}}; }

DraftProposal proposal_of(const TokenSeq& tokens, const std::vector<Distribution>& q_full) {
  DraftProposal out;
  out.tokens = tokens;
  out.q_full = q_full;
  for (std::size_t i = 0; i < tokens.size(); ++i) out.q.push_back(q_full[i][tokens[i]]);
  return out;
}

CycleUniforms uniforms_of(std::vector<double> u, double correction = 0.5) {
  return {std::move(u), correction};
}

// Judge that leans on the target log-probability of the draft token.
judge::JudgeModel simple_judge(double w0 = 1.0, double bias = 2.0) {
  judge::JudgeModel m;
  m.weights.assign(16, 0.0);
  m.weights[0] = w0;
  m.bias = bias;
  return m;
}

std::vector<Distribution> random_dists(Rng& rng, std::size_t count, std::size_t v) {
  std::vector<Distribution> out;
  for (std::size_t i = 0; i < count; ++i) {
    Distribution d{std::vector<double>(v)};
    double sum = 0.0;
    // Coarse values so exact ties appear regularly.
    for (auto& p : d.probs) sum += (p = static_cast<double>(1 + rng() % 4));
    for (auto& p : d.probs) p /= sum;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

TEST_CASE("draft: base case, determinism, greedy oracle") {
  const auto pair = sjtest::make_pair(6, 1, 1.5, 3, 20, 60);
  Rng rng(1);
  const TokenSeq prefix = {2, 4};
  const auto one = draft(pair.draft, prefix, 1, 0.0, rng);
  const auto d = pair.draft.next_distribution(prefix);
  REQUIRE(one.tokens.size() == 1);
  CHECK(one.tokens[0] == sjtest::oracle_argmax(d.probs));
  CHECK(one.q[0] == d.probs[static_cast<std::size_t>(one.tokens[0])]);

  Rng a(99), b(99);
  const auto pa = draft(pair.draft, prefix, 3, 1.0, a);
  const auto pb = draft(pair.draft, prefix, 3, 1.0, b);
  CHECK(pa.tokens == pb.tokens);
  CHECK(pa.q == pb.q);

  // Plain greedy loop over the draft model as the oracle.
  TokenSeq ctx = prefix, expect;
  for (int i = 0; i < 4; ++i) {
    const TokenId t = sjtest::oracle_argmax(pair.draft.next_distribution(ctx).probs);
    expect.push_back(t);
    ctx.push_back(t);
  }
  Rng c(5);
  CHECK(draft(pair.draft, prefix, 4, 0.0, c).tokens == expect);
  CHECK_THROWS_AS(draft(pair.draft, prefix, 0, 0.0, c), Error);
}

TEST_CASE("target_scores: positionwise definitions") {
  const auto pair = sjtest::make_pair(6, 1, 1.5, 4, 20, 60);
  const FeatureExtractor fx(pair.target, pair.draft);
  const TokenSeq prefix = {1}, drafted = {3, 0, 5};
  const auto s = target_scores(pair.target, prefix, drafted, &fx);
  REQUIRE(s.dists.size() == 4);
  REQUIRE(s.features.size() == 3);
  TokenSeq ctx = prefix;
  for (std::size_t j = 0; j <= drafted.size(); ++j) {
    CHECK(s.dists[j].probs == pair.target.next_distribution(ctx).probs);
    if (j < drafted.size()) {
      CHECK(s.features[j] == fx(ctx, drafted[j]));
      ctx.push_back(drafted[j]);
    }
  }
  CHECK(target_scores(pair.target, prefix, TokenSeq{2}).dists.size() == 2);
  CHECK(target_scores(pair.target, prefix, TokenSeq{2}).features.empty());
}

TEST_CASE("verify_rejection: ratio one accepts everything") {
  // p(d_t) >= q(d_t) everywhere, so r_t = 1 and no u can reject.
  const std::vector<Distribution> p = {two(0.8), two(0.9), two(0.7), two(0.6)};
  const auto prop = proposal_of({0, 0, 0}, {two(0.5), two(0.5), two(0.4)});
  const auto tr = verify_rejection(p, prop, uniforms_of({0.999, 0.999, 0.999}), 1.0);
  CHECK(tr.accepted_count == 3);
  CHECK(tr.emitted.size() == 4);
  CHECK(tr.correction_source == CorrectionSource::kBonus);
  for (double r : tr.r) CHECK(r == 1.0);
}

TEST_CASE("verify_rejection: reject at ratio 0.5 with u 0.7") {
  const std::vector<Distribution> p = {two(0.2), two(0.5)};
  const auto prop = proposal_of({0}, {two(0.4)});
  const auto tr = verify_rejection(p, prop, uniforms_of({0.7}, 0.1), 1.0);
  CHECK(tr.r[0] == 0.5);
  CHECK(tr.accepted_count == 0);
  CHECK(tr.decisions[0] == Decision::kReject);
  // Residual max(0, p - q) = (0, 0.2) -> token 1.
  CHECK(tr.emitted == TokenSeq{1});
  CHECK(tr.correction_source == CorrectionSource::kResidual);
  CHECK_FALSE(tr.residual_fallback);
}

TEST_CASE("verify_rejection: residual fallback is flagged") {
  // A zero residual needs p == q_full. q for the drafted token is overstated
  // so the position can still be rejected.
  const std::vector<Distribution> p = {two(0.5), two(0.5)};
  DraftProposal prop;
  prop.tokens = {0};
  prop.q = {0.9};
  prop.q_full = {two(0.5)};
  const auto tr = verify_rejection(p, prop, uniforms_of({0.99}, 0.2), 1.0);
  CHECK(tr.accepted_count == 0);
  CHECK(tr.residual_fallback);
  CHECK(tr.emitted == TokenSeq{0});
}

TEST_CASE("verify_rejection: temperature 0 is argmax matching") {
  const std::vector<Distribution> p = {two(0.9), two(0.3), two(0.5)};
  const auto prop = proposal_of({0, 0}, {two(0.6), two(0.6)});
  const auto tr = verify_rejection(p, prop, uniforms_of({0.0, 0.0}), 0.0);
  CHECK(tr.accepted_count == 1);
  CHECK(tr.emitted == TokenSeq{0, 1});
  CHECK(tr.correction_source == CorrectionSource::kArgmax);
}

TEST_CASE("verify_greedy: all match, first mismatch") {
  const std::vector<Distribution> p = {two(0.9), two(0.2), two(0.6)};
  auto tr = verify_greedy(p, TokenSeq{0, 1});
  CHECK(tr.accepted_count == 2);
  CHECK(tr.emitted == TokenSeq{0, 1, 0});
  tr = verify_greedy(p, TokenSeq{1, 1});
  CHECK(tr.accepted_count == 0);
  CHECK(tr.emitted == TokenSeq{0});
}

TEST_CASE("verify_topk: oracle ranks, k=1 equals greedy, monotone in k") {
  Rng rng(11);
  const std::size_t v = 5;
  for (int trial = 0; trial < 500; ++trial) {
    const int gamma = 1 + static_cast<int>(rng() % 5);
    const auto p = random_dists(rng, static_cast<std::size_t>(gamma) + 1, v);
    TokenSeq drafted(static_cast<std::size_t>(gamma));
    for (auto& t : drafted) t = static_cast<TokenId>(rng() % v);

    const auto g = verify_greedy(p, drafted);
    const auto k1 = verify_topk(p, drafted, 1);
    CHECK(g.emitted == k1.emitted);
    CHECK(g.accepted_count == k1.accepted_count);

    int prev = -1;
    for (int k = 1; k <= static_cast<int>(v); ++k) {
      const auto tr = verify_topk(p, drafted, k);
      int expect = 0;
      while (expect < gamma) {
        const auto order = sjtest::oracle_sorted_tokens(p[static_cast<std::size_t>(expect)].probs);
        const auto pos = std::find(order.begin(), order.end(), drafted[static_cast<std::size_t>(expect)]) - order.begin();
        if (pos >= k) break;
        ++expect;
      }
      CHECK(tr.accepted_count == expect);
      CHECK(tr.accepted_count >= prev);
      prev = tr.accepted_count;
    }
    CHECK(prev == gamma);  // k = V accepts everything
  }
  const std::vector<Distribution> p = {two(0.5), two(0.5)};
  CHECK_THROWS_AS(verify_topk(p, TokenSeq{0}, 3), Error);
  CHECK_THROWS_AS(verify_topk(p, TokenSeq{0}, 0), Error);
}

TEST_CASE("verify_judge_two_stage: degenerate thresholds") {
  const auto pair = sjtest::make_pair(6, 1, 1.0, 8, 20, 60);
  const FeatureExtractor fx(pair.target, pair.draft);
  const auto jm = simple_judge();
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    TokenSeq prefix = {static_cast<TokenId>(rng() % 6), static_cast<TokenId>(rng() % 6)};
    for (double temp : {0.0, 1.0}) {
      const auto prop = draft(pair.draft, prefix, 4, temp, rng);
      auto scores = target_scores(pair.target, prefix, prop.tokens, &fx);
      if (temp > 0) {
        for (auto& d : scores.dists) d = apply_temperature(d, temp);
      }
      const auto uni = draw_uniforms(rng, 4);
      const auto base = verify_rejection(scores.dists, prop, uni, temp);
      const auto never = verify_judge_two_stage(scores.features, scores.dists, prop, jm, kInf, uni, temp);
      CHECK(never.emitted == base.emitted);
      CHECK(never.accepted_count == base.accepted_count);
      CHECK(never.correction_source == base.correction_source);
      const auto always = verify_judge_two_stage(scores.features, scores.dists, prop, jm, -kInf, uni, temp);
      CHECK(always.accepted_count == 4);
      CHECK(always.emitted.size() == 5);
    }
  }
}

TEST_CASE("verify_judge_two_stage: feature dimension mismatch") {
  const std::vector<Distribution> p = {two(0.5), two(0.5)};
  const auto prop = proposal_of({0}, {two(0.5)});
  const std::vector<FeatureVector> feats = {FeatureVector(3, 0.0)};
  CHECK_THROWS_AS(verify_judge_two_stage(feats, p, prop, simple_judge(), 0.5, uniforms_of({0.1}), 0.0), Error);
}

TEST_CASE("decode: self-agreement, budget, losslessness") {
  const auto pair = sjtest::make_pair(8, 1, 1.0, 12, 20, 200);
  const SpeculativeDecoder self(pair.target, pair.target);
  DecodeConfig cfg;
  cfg.gamma = 4;
  cfg.max_new_tokens = 40;
  cfg.policy.kind = PolicyKind::kGreedy;
  auto res = self.decode(TokenSeq{0, 1}, cfg);
  for (const auto& tr : res.traces) CHECK(tr.accepted_count == 4);
  CHECK(res.metrics.mean_emitted_per_cycle == 5.0);
  CHECK(res.tokens.size() == 40);

  const SpeculativeDecoder dec(pair.target, pair.draft);
  cfg.max_new_tokens = 1;
  CHECK(dec.decode(TokenSeq{3}, cfg).tokens.size() == 1);

  cfg.max_new_tokens = 50;
  for (int g : {1, 2, 6}) {
    for (auto kind : {PolicyKind::kRejection, PolicyKind::kGreedy}) {
      for (std::uint64_t seed : {1ULL, 77ULL}) {
        cfg.gamma = g;
        cfg.seed = seed;
        cfg.policy.kind = kind;
        const TokenSeq prompt = {static_cast<TokenId>(seed % 8), 2};
        res = dec.decode(prompt, cfg);
        CHECK(res.tokens == greedy_rollout(pair.target, prompt, 50));
        CHECK(res.metrics.mean_emitted_per_cycle - res.metrics.mean_accepted_draft == 1.0);
        long long acc = 0;
        for (const auto& tr : res.traces) {
          acc += tr.accepted_count;
          CHECK(static_cast<int>(tr.emitted.size()) == tr.accepted_count + 1);
        }
        CHECK(acc == res.metrics.total_accepted);
        CHECK(res.metrics.total_emitted == 50);
      }
    }
  }
  cfg.gamma = 0;
  CHECK_THROWS_AS(dec.decode(TokenSeq{0}, cfg), Error);
  cfg.gamma = 2;
  CHECK_THROWS_AS(dec.decode(TokenSeq{9}, cfg), Error);
  cfg.policy.kind = PolicyKind::kJudge;
  CHECK_THROWS_AS(dec.decode(TokenSeq{0}, cfg), Error);
}

TEST_CASE("decode: stop token ends the sequence") {
  const auto pair = sjtest::make_pair(5, 1, 0.5, 14, 20, 100);
  const SpeculativeDecoder dec(pair.target, pair.draft);
  DecodeConfig cfg;
  cfg.gamma = 5;
  cfg.max_new_tokens = 200;
  cfg.temperature = 1.0;
  cfg.stop_token = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto res = dec.decode(TokenSeq{1}, cfg);
    const auto first = std::find(res.tokens.begin(), res.tokens.end(), 0);
    if (first != res.tokens.end()) CHECK(first + 1 == res.tokens.end());
    for (const auto& tr : res.traces) {
      for (int j = 0; j < tr.accepted_count; ++j) CHECK(tr.draft_tokens[static_cast<std::size_t>(j)] != 0);
    }
  }
}

TEST_CASE("decode: small-sample distribution preservation") {
  // Quick version of the full Monte Carlo check: V=3, two tokens, 40k runs.
  const auto pair = sjtest::make_pair(3, 2, 1.0, 19, 10, 20);
  const SpeculativeDecoder dec(pair.target, pair.draft);
  DecodeConfig cfg;
  cfg.gamma = 2;
  cfg.max_new_tokens = 2;
  cfg.temperature = 1.0;
  std::map<TokenSeq, int> counts;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    cfg.seed = static_cast<std::uint64_t>(i);
    ++counts[dec.decode(TokenSeq{0}, cfg).tokens];
  }
  double tv = 0.0;
  for (TokenId a = 0; a < 3; ++a) {
    for (TokenId b = 0; b < 3; ++b) {
      const double exact = sjtest::oracle_prob(pair.target, {0}, a) * sjtest::oracle_prob(pair.target, {0, a}, b);
      tv += std::abs(counts[TokenSeq{a, b}] / static_cast<double>(n) - exact);
    }
  }
  CHECK(0.5 * tv < 0.02);
}

TEST_CASE("trace_record: one JSON line per cycle") {
  const auto pair = sjtest::make_pair(5, 1, 1.0, 15, 10, 50);
  const SpeculativeDecoder dec(pair.target, pair.draft);
  DecodeConfig cfg;
  cfg.gamma = 3;
  cfg.max_new_tokens = 6;
  const auto res = dec.decode(TokenSeq{1}, cfg);
  const auto line = trace_record(res.traces[0], 7, 0, "rejection");
  CHECK(line.find('\n') == std::string::npos);
  const auto rec = nlohmann::json::parse(line);
  CHECK(rec["policy"] == "rejection");
  CHECK(rec["prompt_id"] == 7);
  CHECK(rec["accepted_count"] == res.traces[0].accepted_count);
  CHECK(rec["positions"].size() == 3);
  CHECK(rec["positions"][0].contains("r"));
  CHECK(rec["emitted"].get<TokenSeq>() == res.traces[0].emitted);
}
