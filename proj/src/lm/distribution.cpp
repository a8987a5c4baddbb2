// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/distribution.hpp"

#include <cmath>

#include "specjudge/error.hpp"

namespace specjudge {

TokenId Distribution::argmax() const {
  if (probs.empty()) fail("empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return static_cast<TokenId>(best);
}

double Distribution::entropy() const {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::size_t Distribution::rank_of(TokenId id) const {
  const double target = (*this)[id];
  std::size_t rank = 0;
  for (double p : probs) {
    if (p > target) ++rank;
  }
  return rank;
}

Distribution apply_temperature(const Distribution& dist, double temperature) {
  if (!(temperature >= 0.0)) fail("temperature must be >= 0");
  if (temperature == 0.0) {
    Distribution point{std::vector<double>(dist.size(), 0.0)};
    point.probs[static_cast<std::size_t>(dist.argmax())] = 1.0;
    return point;
  }
  if (temperature == 1.0) return dist;
  // Work in log space relative to the max so large 1/t does not underflow
  // everything.
  double max_log = -INFINITY;
  for (double p : dist.probs) {
    if (p > 0.0) max_log = std::max(max_log, std::log(p));
  }
  Distribution out{std::vector<double>(dist.size(), 0.0)};
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.probs[i] <= 0.0) continue;
    out.probs[i] = std::exp((std::log(dist.probs[i]) - max_log) / temperature);
    total += out.probs[i];
  }
  for (double& p : out.probs) p /= total;
  return out;
}

TokenId sample_with_uniform(const Distribution& dist, double u) {
  double total = 0.0;
  for (double p : dist.probs) total += p;
  const double threshold = u * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.probs[i] <= 0.0) continue;
    acc += dist.probs[i];
    last_positive = i;
    if (threshold < acc) return static_cast<TokenId>(i);
  }
  // Rounding can leave threshold == acc at the very top.
  return static_cast<TokenId>(last_positive);
}

TokenId sample_token(const Distribution& dist, double temperature, Rng& rng) {
  if (temperature == 0.0) return dist.argmax();
  return sample_with_uniform(apply_temperature(dist, temperature), uniform01(rng));
}

}  // namespace specjudge
