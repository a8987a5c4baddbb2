// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/info_theory.hpp"

#include <cmath>

#include "specjudge/distribution.hpp"
#include "specjudge/error.hpp"

namespace specjudge::info {

namespace {

double xlogx_ratio(double num, double den) {
  return num > 0.0 ? num * std::log(num / den) : 0.0;
}

std::vector<double> marginal_cx(const Joint& j) {
  std::vector<double> m(j.prefix_support * j.token_support, 0.0);
  for (std::size_t c = 0; c < j.prefix_support; ++c)
    for (std::size_t x = 0; x < j.token_support; ++x)
      for (std::size_t s = 0; s < j.suffix_support; ++s)
        m[c * j.token_support + x] += j.at(c, x, s);
  return m;
}

std::vector<double> marginal_cs(const Joint& j) {
  std::vector<double> m(j.prefix_support * j.suffix_support, 0.0);
  for (std::size_t c = 0; c < j.prefix_support; ++c)
    for (std::size_t x = 0; x < j.token_support; ++x)
      for (std::size_t s = 0; s < j.suffix_support; ++s)
        m[c * j.suffix_support + s] += j.at(c, x, s);
  return m;
}

std::vector<double> marginal_c(const Joint& j) {
  std::vector<double> m(j.prefix_support, 0.0);
  for (std::size_t c = 0; c < j.prefix_support; ++c)
    for (std::size_t x = 0; x < j.token_support; ++x)
      for (std::size_t s = 0; s < j.suffix_support; ++s) m[c] += j.at(c, x, s);
  return m;
}

std::vector<double> random_simplex(std::size_t n, Rng& rng, bool sparse) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) {
    v = -std::log1p(-uniform01(rng));  // Exp(1) gives a flat Dirichlet
    if (sparse && uniform01(rng) < 0.4) v = 0.0;
    total += v;
  }
  if (total == 0.0) {
    w[rng() % n] = 1.0;
    total = 1.0;
  }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

double entropy_given_prefix(const Joint& j) {
  const auto cx = marginal_cx(j);
  const auto c = marginal_c(j);
  double h = 0.0;
  for (std::size_t ci = 0; ci < j.prefix_support; ++ci)
    for (std::size_t x = 0; x < j.token_support; ++x)
      h -= xlogx_ratio(cx[ci * j.token_support + x], c[ci]);
  return h;
}

double entropy_given_both(const Joint& j) {
  const auto cs = marginal_cs(j);
  double h = 0.0;
  for (std::size_t c = 0; c < j.prefix_support; ++c)
    for (std::size_t x = 0; x < j.token_support; ++x)
      for (std::size_t s = 0; s < j.suffix_support; ++s)
        h -= xlogx_ratio(j.at(c, x, s), cs[c * j.suffix_support + s]);
  return h;
}

double conditional_mutual_information(const Joint& j) {
  const auto cx = marginal_cx(j);
  const auto cs = marginal_cs(j);
  const auto c = marginal_c(j);
  double i = 0.0;
  for (std::size_t ci = 0; ci < j.prefix_support; ++ci)
    for (std::size_t x = 0; x < j.token_support; ++x)
      for (std::size_t s = 0; s < j.suffix_support; ++s) {
        const double p = j.at(ci, x, s);
        if (p <= 0.0) continue;
        i += p * std::log(c[ci] * p /
                          (cx[ci * j.token_support + x] * cs[ci * j.suffix_support + s]));
      }
  return i;
}

Joint random_joint(JointFamily family, std::size_t max_support, std::uint64_t seed) {
  if (max_support < 2) fail("max_support must be >= 2");
  Rng rng(seed);
  auto support = [&](std::size_t lo) { return lo + rng() % (max_support - lo + 1); };
  Joint j;
  j.prefix_support = 1 + rng() % 4;
  j.token_support = support(2);
  j.suffix_support = support(1);
  const std::size_t cxs = j.prefix_support * j.token_support * j.suffix_support;
  j.p.assign(cxs, 0.0);

  switch (family) {
    case JointFamily::kGeneral:
    case JointFamily::kSparse:
      j.p = random_simplex(cxs, rng, family == JointFamily::kSparse);
      break;
    case JointFamily::kIndependent: {
      // X and S independent given C.
      const auto pc = random_simplex(j.prefix_support, rng, false);
      for (std::size_t c = 0; c < j.prefix_support; ++c) {
        const auto px = random_simplex(j.token_support, rng, false);
        const auto ps = random_simplex(j.suffix_support, rng, false);
        for (std::size_t x = 0; x < j.token_support; ++x)
          for (std::size_t s = 0; s < j.suffix_support; ++s)
            j.p[(c * j.token_support + x) * j.suffix_support + s] = pc[c] * px[x] * ps[s];
      }
      break;
    }
    case JointFamily::kDeterministic: {
      // S = x, so the suffix identifies the token.
      j.suffix_support = j.token_support;
      j.p.assign(j.prefix_support * j.token_support * j.suffix_support, 0.0);
      const auto pcx = random_simplex(j.prefix_support * j.token_support, rng, false);
      for (std::size_t c = 0; c < j.prefix_support; ++c)
        for (std::size_t x = 0; x < j.token_support; ++x)
          j.p[(c * j.token_support + x) * j.suffix_support + x] = pcx[c * j.token_support + x];
      break;
    }
  }
  return j;
}

TheoremCheck check_conditioning_reduces_entropy(std::size_t trials, std::size_t max_support,
                                                std::uint64_t seed) {
  constexpr JointFamily kFamilies[] = {JointFamily::kGeneral, JointFamily::kSparse,
                                       JointFamily::kIndependent, JointFamily::kDeterministic};
  TheoremCheck out;
  out.trials = trials;
  out.max_gap = -INFINITY;
  for (std::size_t t = 0; t < trials; ++t) {
    const Joint j = random_joint(kFamilies[t % 4], max_support, seed + t);
    const double h_prefix = entropy_given_prefix(j);
    const double h_both = entropy_given_both(j);
    const double cmi = conditional_mutual_information(j);
    const double gap = h_both - h_prefix;
    out.max_gap = std::max(out.max_gap, gap);
    if (gap > 1e-12) ++out.violations;
    if (cmi > 1e-6) {
      ++out.strict_required;
      if (!(h_both < h_prefix)) ++out.strict_failures;
    }
  }
  return out;
}

}  // namespace specjudge::info
