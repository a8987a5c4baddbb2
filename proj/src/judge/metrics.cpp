// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specjudge/error.hpp"
#include "specjudge/judge.hpp"

namespace specjudge::judge {

namespace {

std::pair<std::size_t, std::size_t> class_counts(std::span<const double> scores,
                                                 std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) fail("score/label count mismatch");
  std::size_t pos = 0;
  for (auto l : labels) pos += l ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) fail("both classes must be present");
  return {pos, neg};
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const auto [pos, neg] = class_counts(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of average (1-based) ranks of positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

ThresholdChoice select_threshold(std::span<const double> scores,
                                 std::span<const std::uint8_t> labels,
                                 ThresholdCriterion criterion, double target_recall) {
  const auto [pos, neg] = class_counts(scores, labels);
  for (double s : scores) {
    if (!std::isfinite(s)) fail("scores must be finite");
  }

  // Unique scores ascending with per-value positive/negative tallies.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> values;
  std::vector<std::size_t> pos_at, neg_at;
  for (std::size_t idx : order) {
    if (values.empty() || scores[idx] != values.back()) {
      values.push_back(scores[idx]);
      pos_at.push_back(0);
      neg_at.push_back(0);
    }
    (labels[idx] ? pos_at : neg_at).back() += 1;
  }

  // Candidate c_k accepts values[k..]: c_0 = min - 1, c_k = midpoint of
  // values[k-1], values[k], and c_m = max + 1 accepts nothing.
  const std::size_t m = values.size();
  auto candidate = [&](std::size_t k) {
    if (k == 0) return values.front() - 1.0;
    if (k == m) return values.back() + 1.0;
    return 0.5 * (values[k - 1] + values[k]);
  };
  // Suffix sums: tp[k], fp[k] for accepting values[k..].
  std::vector<std::size_t> tp(m + 1, 0), fp(m + 1, 0);
  for (std::size_t k = m; k-- > 0;) {
    tp[k] = tp[k + 1] + pos_at[k];
    fp[k] = fp[k + 1] + neg_at[k];
  }
  const double p = static_cast<double>(pos);
  (void)neg;

  ThresholdChoice choice;
  if (criterion == ThresholdCriterion::kF1) {
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k <= m; ++k) {
      const double t = static_cast<double>(tp[k]);
      const double f = static_cast<double>(fp[k]);
      const double fn = p - t;
      const double denom = 2.0 * t + f + fn;
      const double f1 = denom > 0.0 ? 2.0 * t / denom : 0.0;
      if (f1 >= best) {  // >= keeps the larger theta on ties
        best = f1;
        best_k = k;
      }
    }
    choice.theta = candidate(best_k);
    choice.metric = best;
    return choice;
  }

  for (std::size_t k = m + 1; k-- > 0;) {
    const double recall = static_cast<double>(tp[k]) / p;
    if (recall >= target_recall) {
      choice.theta = candidate(k);
      choice.metric = recall;
      return choice;
    }
  }
  choice.theta = candidate(0);
  choice.metric = 1.0;
  choice.warning = true;
  return choice;
}

}  // namespace specjudge::judge
