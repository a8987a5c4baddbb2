// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "specjudge/features.hpp"

namespace specjudge::judge {

// Feature rows with binary labels (1 = acceptable substitution).
struct TrainingSet {
  std::vector<FeatureVector> x;
  std::vector<std::uint8_t> y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dim() const noexcept { return x.empty() ? 0 : x.front().size(); }
};

struct Thresholds {
  double theta_recall = std::numeric_limits<double>::quiet_NaN();
  double theta_f1 = std::numeric_limits<double>::quiet_NaN();
};

struct TrainingMeta {
  double c = 0.0;
  double auc = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  int iterations = 0;
};

// Optional z-scoring applied before the linear map.
struct Standardization {
  bool enabled = false;
  std::vector<double> mean;
  std::vector<double> scale;
};

// Logistic-regression verifier. Immutable once trained; safe for concurrent
// scoring.
struct JudgeModel {
  static constexpr int kFormatVersion = 1;

  std::vector<double> weights;
  double bias = 0.0;
  Thresholds thresholds;
  TrainingMeta meta;
  Standardization standardization;

  std::size_t feature_dim() const noexcept { return weights.size(); }

  double logit(std::span<const double> features) const;
  double predict_proba(std::span<const double> features) const;

  // Numbers are written with 17 significant digits, so a load/save round trip
  // is bit-exact.
  std::string serialize(const std::string& config_json = "null") const;
  static JudgeModel deserialize(const std::string& text);
  void save(const std::filesystem::path& path,
            const std::string& config_json = "null") const;
  static JudgeModel load(const std::filesystem::path& path);
};

double sigmoid(double z);

// Mean logistic NLL + 1/(2 C n) * |w|^2 with the bias unpenalized.
// `params` is [w..., b]; the gradient (same layout) is written when non-null.
double logistic_objective(const TrainingSet& data, std::span<const double> params,
                          double c, std::vector<double>* gradient = nullptr);

struct FitOptions {
  int max_iter = 2000;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  bool standardize = false;
};

// Full-batch gradient descent, diagonally scaled, with backtracking line
// search from zero.
// Thresholds are left unset. Throws "degenerate labels" on single-class data.
JudgeModel train_logistic(const TrainingSet& data, double c, const FitOptions& options,
                          std::vector<double>* loss_history = nullptr);

double predict_proba(const JudgeModel& model, std::span<const double> features);

// P(score_pos > score_neg) + 0.5 P(tie) over all positive/negative pairs,
// computed from average ranks.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

enum class ThresholdCriterion { kRecall, kF1 };

struct ThresholdChoice {
  double theta = 0.0;
  double metric = 0.0;  // F1 or recall at theta
  bool warning = false;
};

// Candidates are (min - 1), midpoints of sorted unique scores, and (max + 1);
// a score is accepted when score > theta.
ThresholdChoice select_threshold(std::span<const double> scores,
                                 std::span<const std::uint8_t> labels,
                                 ThresholdCriterion criterion,
                                 double target_recall = 0.99);

std::vector<double> default_c_grid();

struct TrainConfig {
  std::vector<double> c_grid = default_c_grid();
  double holdout_fraction = 0.2;
  FitOptions fit;
  double target_recall = 0.99;
  int workers = 1;
};

struct GridPoint {
  double c = 0.0;
  double auc = 0.0;
};

struct GridResult {
  JudgeModel model;
  std::vector<GridPoint> points;
  bool threshold_warning = false;
};

// Stratified seeded split into train/holdout: indices of each class are
// shuffled and ceil(fraction * class size) go to the holdout. Both classes
// need at least two examples.
std::pair<TrainingSet, TrainingSet> split_holdout(const TrainingSet& data,
                                                  double fraction, std::uint64_t seed);

// One fit per C, best holdout ROC-AUC wins (ties go to the smaller C), then
// both thresholds are calibrated on the holdout scores.
GridResult grid_search(const TrainingSet& data, const TrainConfig& config);

}  // namespace specjudge::judge
