// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specjudge/error.hpp"
#include "specjudge/judge.hpp"

namespace specjudge::judge {

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void check_data(const TrainingSet& data) {
  if (data.x.size() != data.y.size()) fail("feature/label count mismatch");
  if (data.y.empty()) fail("empty training set");
  const std::size_t d = data.dim();
  for (const auto& row : data.x) {
    if (row.size() != d) fail("ragged feature rows");
  }
  const auto positives = std::count(data.y.begin(), data.y.end(), std::uint8_t{1});
  if (positives == 0 || static_cast<std::size_t>(positives) == data.y.size()) {
    fail("degenerate labels");
  }
}

Standardization fit_standardization(const TrainingSet& data) {
  const std::size_t d = data.dim();
  const double n = static_cast<double>(data.size());
  Standardization s;
  s.enabled = true;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& row : data.x) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  }
  for (double& m : s.mean) m /= n;
  for (const auto& row : data.x) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - s.mean[j];
      s.scale[j] += c * c;
    }
  }
  for (double& sc : s.scale) {
    sc = std::sqrt(sc / n);
    if (!(sc > 1e-12)) sc = 1.0;
  }
  return s;
}

TrainingSet apply_standardization(const TrainingSet& data, const Standardization& s) {
  TrainingSet out = data;
  for (auto& row : out.x) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - s.mean[j]) / s.scale[j];
  }
  return out;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double JudgeModel::logit(std::span<const double> features) const {
  if (features.size() != weights.size()) fail("feature dimension mismatch");
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    double x = features[j];
    if (standardization.enabled) x = (x - standardization.mean[j]) / standardization.scale[j];
    z += weights[j] * x;
  }
  return z;
}

double JudgeModel::predict_proba(std::span<const double> features) const {
  return sigmoid(logit(features));
}

double predict_proba(const JudgeModel& model, std::span<const double> features) {
  return model.predict_proba(features);
}

double logistic_objective(const TrainingSet& data, std::span<const double> params,
                          double c, std::vector<double>* gradient) {
  const std::size_t d = data.dim();
  if (params.size() != d + 1) fail("parameter dimension mismatch");
  const double n = static_cast<double>(data.size());
  const double bias = params[d];
  if (gradient) gradient->assign(d + 1, 0.0);
  double nll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& row = data.x[i];
    double z = bias;
    for (std::size_t j = 0; j < d; ++j) z += params[j] * row[j];
    const double y = data.y[i] ? 1.0 : 0.0;
    nll += softplus(z) - y * z;
    if (gradient) {
      const double residual = sigmoid(z) - y;
      for (std::size_t j = 0; j < d; ++j) (*gradient)[j] += residual * row[j];
      (*gradient)[d] += residual;
    }
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < d; ++j) penalty += params[j] * params[j];
  const double lambda = 1.0 / (c * n);
  if (gradient) {
    for (std::size_t j = 0; j < d; ++j) (*gradient)[j] = (*gradient)[j] / n + lambda * params[j];
    (*gradient)[d] /= n;
  }
  return nll / n + 0.5 * lambda * penalty;
}

JudgeModel train_logistic(const TrainingSet& raw, double c, const FitOptions& options,
                          std::vector<double>* loss_history) {
  check_data(raw);
  if (!(c > 0.0) || !std::isfinite(c)) fail("C must be > 0");
  if (options.max_iter < 0) fail("max_iter must be >= 0");

  JudgeModel model;
  TrainingSet scaled;
  const TrainingSet* data = &raw;
  if (options.standardize) {
    model.standardization = fit_standardization(raw);
    scaled = apply_standardization(raw, model.standardization);
    data = &scaled;
  }

  const std::size_t d = raw.dim();
  const double n = static_cast<double>(data->size());
  // Diagonal curvature bounds: 0.25 * mean(x_j^2) + lambda for weights and
  // 0.25 for the unpenalized bias. Scaling by them keeps tiny C tractable.
  std::vector<double> inv_curv(d + 1, 0.0);
  for (const auto& row : data->x) {
    for (std::size_t j = 0; j < d; ++j) inv_curv[j] += row[j] * row[j];
  }
  const double lambda = 1.0 / (c * n);
  for (std::size_t j = 0; j < d; ++j) inv_curv[j] = 1.0 / (0.25 * inv_curv[j] / n + lambda);
  inv_curv[d] = 4.0;

  std::vector<double> params(d + 1, 0.0);
  std::vector<double> grad;
  std::vector<double> trial(d + 1);
  double loss = logistic_objective(*data, params, c, &grad);
  if (loss_history) loss_history->assign(1, loss);
  double step = 1.0;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    double gnorm2 = 0.0;
    double decrease = 0.0;
    for (std::size_t j = 0; j <= d; ++j) {
      gnorm2 += grad[j] * grad[j];
      decrease += grad[j] * grad[j] * inv_curv[j];
    }
    if (std::sqrt(gnorm2) < options.tol) break;

    // Armijo backtracking along the scaled gradient; start from twice the
    // last accepted step.
    step = std::min(step * 2.0, 1e6);
    double trial_loss = 0.0;
    bool accepted = false;
    while (step > 1e-20) {
      for (std::size_t j = 0; j <= d; ++j) trial[j] = params[j] - step * inv_curv[j] * grad[j];
      trial_loss = logistic_objective(*data, trial, c);
      if (trial_loss <= loss - 0.5 * step * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    params.swap(trial);
    loss = logistic_objective(*data, params, c, &grad);
    if (loss_history) loss_history->push_back(loss);
  }

  model.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
  model.bias = params[d];
  model.meta.c = c;
  model.meta.seed = options.seed;
  model.meta.iterations = iter;
  return model;
}

}  // namespace specjudge::judge
