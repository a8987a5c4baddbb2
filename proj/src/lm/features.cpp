// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/features.hpp"

#include <cmath>

#include "specjudge/error.hpp"

namespace specjudge {

FeatureExtractor::FeatureExtractor(const NGramModel& target, const NGramModel& draft,
                                   std::size_t dim, std::uint64_t seed)
    : target_(&target), draft_(&draft), dim_(dim) {
  if (dim_ < kFixedSlots) fail("feature dim must be >= 6");
  if (target.vocab_size() != draft.vocab_size()) fail("target/draft vocab mismatch");
  std::size_t next = 0;
  for (const auto& [ctx, _] : target.counts()) context_index_.emplace(ctx, next++);
  const std::size_t projected = dim_ - kFixedSlots;
  const std::size_t columns = (context_index_.size() + 1) * target.vocab_size();
  proj_.resize(columns * projected);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& w : proj_) w = gauss(rng);
}

std::size_t FeatureExtractor::column(std::span<const TokenId> context, TokenId token) const {
  auto it = context_index_.find(TokenSeq(context.begin(), context.end()));
  const std::size_t ctx = it == context_index_.end() ? context_index_.size() : it->second;
  return ctx * target_->vocab_size() + static_cast<std::size_t>(token);
}

FeatureVector FeatureExtractor::operator()(std::span<const TokenId> prefix,
                                           TokenId token) const {
  if (!target_->vocab().contains(token)) fail("unknown token");
  const Distribution p = target_->next_distribution(prefix);
  const double logp = std::log(p[token]);
  const std::size_t v = p.size();
  const auto context = target_->context_of(prefix);
  const int max_ctx = target_->order() - 1;

  FeatureVector f(dim_, 0.0);
  f[0] = logp;
  f[1] = std::log(draft_->prob(prefix, token));
  f[2] = p.entropy();
  f[3] = static_cast<double>(p.rank_of(token)) / static_cast<double>(v - 1);
  f[4] = std::log(p[p.argmax()]) - logp;
  f[5] = max_ctx > 0 ? static_cast<double>(context.size()) / max_ctx : 0.0;

  const std::size_t projected = dim_ - kFixedSlots;
  const double* col = proj_.data() + column(context, token) * projected;
  for (std::size_t s = 0; s < projected; ++s) f[kFixedSlots + s] = col[s];
  return f;
}

}  // namespace specjudge
