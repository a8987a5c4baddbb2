// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "specjudge/vocab.hpp"

namespace specjudge {

using Rng = std::mt19937_64;

// Uniform draw in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Probability vector over a vocab. Entries are >= 0 and sum to 1.
struct Distribution {
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](TokenId id) const { return probs[static_cast<std::size_t>(id)]; }

  // Highest-probability token; ties go to the lowest id.
  TokenId argmax() const;
  double entropy() const;
  // Number of tokens with strictly greater probability than `id`.
  std::size_t rank_of(TokenId id) const;
};

// probs^(1/temperature), renormalized. Temperature 0 yields a point mass at
// the argmax; temperature 1 returns the input unchanged.
Distribution apply_temperature(const Distribution& dist, double temperature);

// Inverse-CDF draw using a caller-supplied uniform in [0, 1).
TokenId sample_with_uniform(const Distribution& dist, double u);

// Temperature 0 is argmax (lowest-id tie break); otherwise one uniform is
// consumed from `rng` and the tempered distribution is sampled.
TokenId sample_token(const Distribution& dist, double temperature, Rng& rng);

}  // namespace specjudge
