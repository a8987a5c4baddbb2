// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <future>

#include "specjudge/error.hpp"
#include "specjudge/judge.hpp"

namespace specjudge::judge {

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(std::pow(10.0, -3.0 + 5.0 * i / 9.0));
  return grid;
}

std::pair<TrainingSet, TrainingSet> split_holdout(const TrainingSet& data,
                                                  double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) fail("holdout_fraction must be in (0,1)");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.y[i] ? 1 : 0].push_back(i);
  if (by_class[0].size() < 2 || by_class[1].size() < 2) {
    fail("degenerate labels");
  }
  Rng rng(seed);
  std::vector<std::uint8_t> in_holdout(data.size(), 0);
  for (auto& idx : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(idx.size())));
    take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
    for (std::size_t k = 0; k < take; ++k) in_holdout[idx[k]] = 1;
  }
  TrainingSet train, holdout;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& dst = in_holdout[i] ? holdout : train;
    dst.x.push_back(data.x[i]);
    dst.y.push_back(data.y[i]);
  }
  return {std::move(train), std::move(holdout)};
}

GridResult grid_search(const TrainingSet& data, const TrainConfig& config) {
  if (config.c_grid.empty()) fail("c_grid must be nonempty");
  for (double c : config.c_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) fail("c_grid values must be positive");
  }
  auto [train, holdout] = split_holdout(data, config.holdout_fraction, config.fit.seed);

  const std::size_t count = config.c_grid.size();
  std::vector<JudgeModel> models(count);
  std::vector<double> aucs(count);
  auto fit_one = [&](std::size_t i) {
    models[i] = train_logistic(train, config.c_grid[i], config.fit);
    std::vector<double> scores;
    scores.reserve(holdout.size());
    for (const auto& row : holdout.x) scores.push_back(models[i].predict_proba(row));
    aucs[i] = roc_auc(scores, holdout.y);
  };
  const std::size_t workers = static_cast<std::size_t>(std::max(1, config.workers));
  for (std::size_t start = 0; start < count; start += workers) {
    std::vector<std::future<void>> batch;
    const std::size_t end = std::min(count, start + workers);
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                 fit_one, i));
    }
    for (auto& f : batch) f.get();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    const bool better = aucs[i] > aucs[best] ||
                        (aucs[i] == aucs[best] && config.c_grid[i] < config.c_grid[best]);
    if (better) best = i;
  }

  GridResult result;
  for (std::size_t i = 0; i < count; ++i) result.points.push_back({config.c_grid[i], aucs[i]});
  result.model = std::move(models[best]);
  result.model.meta.auc = aucs[best];

  std::vector<double> scores;
  for (const auto& row : holdout.x) scores.push_back(result.model.predict_proba(row));
  const auto by_recall =
      select_threshold(scores, holdout.y, ThresholdCriterion::kRecall, config.target_recall);
  const auto by_f1 = select_threshold(scores, holdout.y, ThresholdCriterion::kF1);
  result.model.thresholds.theta_recall = by_recall.theta;
  result.model.thresholds.theta_f1 = by_f1.theta;
  result.threshold_warning = by_recall.warning;
  return result;
}

}  // namespace specjudge::judge
