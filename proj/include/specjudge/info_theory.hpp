// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace specjudge::info {

// Joint distribution p(c, x, s) over prefix value c, token x and suffix s,
// stored flat as [c][x][s].
struct Joint {
  std::size_t prefix_support = 1;
  std::size_t token_support = 1;
  std::size_t suffix_support = 1;
  std::vector<double> p;

  double at(std::size_t c, std::size_t x, std::size_t s) const {
    return p[(c * token_support + x) * suffix_support + s];
  }
};

// H(X | C) in nats.
double entropy_given_prefix(const Joint& j);
// H(X | C, S) in nats.
double entropy_given_both(const Joint& j);
// I(X; S | C) from the KL form sum p log[p(c) p(c,x,s) / (p(c,x) p(c,s))].
double conditional_mutual_information(const Joint& j);

enum class JointFamily { kGeneral, kSparse, kIndependent, kDeterministic };

// Random joint from `family` on supports drawn up to `max_support`.
Joint random_joint(JointFamily family, std::size_t max_support, std::uint64_t seed);

struct TheoremCheck {
  std::size_t trials = 0;
  std::size_t violations = 0;         // H(X|C,S) > H(X|C) + 1e-12
  std::size_t strict_required = 0;    // cases with CMI > 1e-6
  std::size_t strict_failures = 0;    // ... where the inequality was not strict
  double max_gap = 0.0;               // max of H(X|C,S) - H(X|C)
  bool passed() const { return violations == 0 && strict_failures == 0; }
};

// Cycles through the joint families over `trials` seeded joints.
TheoremCheck check_conditioning_reduces_entropy(std::size_t trials, std::size_t max_support,
                                                std::uint64_t seed);

}  // namespace specjudge::info
