// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "specjudge/error.hpp"
#include "specjudge/judge.hpp"
#include "test_support.hpp"

using namespace specjudge;
using namespace specjudge::judge;

namespace {

struct Counts {
  double tp = 0, fp = 0, fn = 0;
};

Counts confusion(const std::vector<double>& s, const std::vector<std::uint8_t>& y, double theta) {
  Counts c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool accept = s[i] > theta;
    if (accept && y[i]) c.tp += 1;
    if (accept && !y[i]) c.fp += 1;
    if (!accept && y[i]) c.fn += 1;
  }
  return c;
}

double f1_at(const std::vector<double>& s, const std::vector<std::uint8_t>& y, double theta) {
  const auto c = confusion(s, y, theta);
  return c.tp == 0 ? 0.0 : 2 * c.tp / (2 * c.tp + c.fp + c.fn);
}

double recall_at(const std::vector<double>& s, const std::vector<std::uint8_t>& y, double theta) {
  const auto c = confusion(s, y, theta);
  return c.tp / (c.tp + c.fn);
}

std::vector<double> candidate_thresholds(std::vector<double> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<double> out = {s.front() - 1.0};
  for (std::size_t i = 0; i + 1 < s.size(); ++i) out.push_back(0.5 * (s[i] + s[i + 1]));
  out.push_back(s.back() + 1.0);
  return out;
}

}  // namespace

TEST_CASE("logistic_objective: gradient matches central differences") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int problem = 0; problem < 20; ++problem) {
    const auto data = sjtest::random_problem(rng, 200, 16);
    const double c = std::pow(10.0, -2.0 + 4.0 * (problem % 5) / 4.0);
    std::vector<double> params(17);
    for (auto& p : params) p = 0.5 * g(rng);
    std::vector<double> grad;
    logistic_objective(data, params, c, &grad);
    const double h = 1e-5;
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto plus = params, minus = params;
      plus[k] += h;
      minus[k] -= h;
      const double fd = (logistic_objective(data, plus, c) - logistic_objective(data, minus, c)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[k]) / std::max(1e-8, std::max(std::abs(fd), std::abs(grad[k]))));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("train_logistic: separable pair, vanishing C, degenerate labels") {
  TrainingSet two;
  two.x = {{-1.0}, {1.0}};
  two.y = {0, 1};
  FitOptions opt;
  opt.max_iter = 5000;
  opt.tol = 1e-9;
  const auto m = train_logistic(two, 1e6, opt);
  const std::vector<double> params = {m.weights[0], m.bias};
  CHECK(logistic_objective(two, params, 1e6) < 0.01);
  CHECK(m.predict_proba(two.x[0]) < 0.5);
  CHECK(m.predict_proba(two.x[1]) > 0.5);

  std::mt19937_64 rng(3);
  auto data = sjtest::random_problem(rng, 100, 4);
  const auto tiny = train_logistic(data, 1e-9, FitOptions{});
  double pos = 0;
  for (auto y : data.y) pos += y;
  const double base = pos / static_cast<double>(data.size());
  for (double w : tiny.weights) CHECK(std::abs(w) < 1e-6);
  CHECK(tiny.predict_proba(data.x[5]) == doctest::Approx(base).epsilon(1e-4));

  std::fill(data.y.begin(), data.y.end(), 1);
  try {
    (void)train_logistic(data, 1.0, FitOptions{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "degenerate labels");
  }
}

TEST_CASE("train_logistic: loss never increases") {
  const auto data = sjtest::planted_data(400, 5);
  std::vector<double> history;
  FitOptions opt;
  opt.max_iter = 300;
  (void)train_logistic(data, 1.0, opt, &history);
  REQUIRE(history.size() > 2);
  for (std::size_t i = 1; i < history.size(); ++i) CHECK(history[i] <= history[i - 1]);
}

TEST_CASE("predict_proba: definition, monotonicity, logit-space equivalence") {
  JudgeModel zero;
  zero.weights.assign(4, 0.0);
  CHECK(zero.predict_proba(std::vector<double>{1, 2, 3, 4}) == 0.5);

  const auto data = sjtest::planted_data(300, 9);
  const auto m = train_logistic(data, 1.0, FitOptions{});
  for (const auto& x : data.x) {
    double z = m.bias;
    for (std::size_t k = 0; k < x.size(); ++k) z += m.weights[k] * x[k];
    const double expect = 1.0 / (1.0 + std::exp(-z));
    CHECK(std::abs(m.predict_proba(x) - expect) <= 1e-15);
    for (double theta : {-1.0, 0.0, 0.7}) {
      CHECK((m.predict_proba(x) > sigmoid(theta)) == (m.logit(x) > theta));
    }
  }
  auto x = data.x[0];
  std::size_t slot = 0;
  for (std::size_t k = 0; k < m.weights.size(); ++k) if (m.weights[k] > m.weights[slot]) slot = k;
  REQUIRE(m.weights[slot] > 0);
  const double before = m.predict_proba(x);
  x[slot] += 0.5;
  CHECK(m.predict_proba(x) > before);
  CHECK_THROWS_AS(m.predict_proba(std::vector<double>(3, 0.0)), Error);
}

TEST_CASE("roc_auc: definition and pair-count oracle") {
  const std::vector<std::uint8_t> y = {0, 0, 1, 1};
  CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y) == 1.0);
  CHECK(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y) == 0.5);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<std::uint8_t>{1, 1}), Error);

  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> s(500);
    std::vector<std::uint8_t> lab(500);
    for (std::size_t i = 0; i < 500; ++i) {
      s[i] = static_cast<double>(rng() % 60) / 7.0;  // frequent ties
      lab[i] = static_cast<std::uint8_t>(rng() % 3 == 0);
    }
    CHECK(std::abs(roc_auc(s, lab) - sjtest::oracle_auc(s, lab)) <= 1e-12);
    std::vector<double> t(s.size());
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3 * v) - 2.0; });
    CHECK(roc_auc(t, lab) == roc_auc(s, lab));
  }
}

TEST_CASE("select_threshold: separated classes and boundaries") {
  const std::vector<double> s = {0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
  const std::vector<std::uint8_t> y = {0, 0, 0, 1, 1, 1};
  const auto f1 = select_threshold(s, y, ThresholdCriterion::kF1);
  CHECK(f1.metric == 1.0);
  CHECK(f1.theta > 0.3);
  CHECK(f1.theta < 0.7);
  const auto rec = select_threshold(s, y, ThresholdCriterion::kRecall, 0.99);
  CHECK(rec.theta == doctest::Approx(0.5));
  CHECK_FALSE(rec.warning);
  // Target 0 is met by any threshold above the largest score.
  const auto zero = select_threshold(s, y, ThresholdCriterion::kRecall, 0.0);
  CHECK(zero.theta == doctest::Approx(1.9));
  // Unattainable target falls back to min - 1 with a warning.
  const auto impossible = select_threshold(s, y, ThresholdCriterion::kRecall, 1.5);
  CHECK(impossible.warning);
  CHECK(impossible.theta == doctest::Approx(-0.9));
}

TEST_CASE("select_threshold: exhaustive sweep oracle") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng() % 200;
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<std::uint8_t>(rng() % 2);
      s[i] = std::round((g(rng) + (y[i] ? 0.8 : 0.0)) * 20.0) / 20.0;
    }
    y[0] = 0;
    y[1] = 1;
    double best_f1 = -1, best_theta = 0, best_recall_theta = -INFINITY;
    const double target = 0.9;
    for (double theta : candidate_thresholds(s)) {
      const double f = f1_at(s, y, theta);
      if (f >= best_f1) {  // ascending sweep: ties move to the larger theta
        best_f1 = f;
        best_theta = theta;
      }
      if (recall_at(s, y, theta) >= target) best_recall_theta = theta;
    }
    const auto got = select_threshold(s, y, ThresholdCriterion::kF1);
    CHECK(got.metric == doctest::Approx(best_f1).epsilon(1e-12));
    CHECK(got.theta == best_theta);
    CHECK(select_threshold(s, y, ThresholdCriterion::kRecall, target).theta == best_recall_theta);
  }
}

TEST_CASE("grid_search: planted rule, single value, duplicates") {
  const auto data = sjtest::planted_data(1000, 123);
  TrainConfig cfg;
  cfg.fit.seed = 5;
  const auto res = grid_search(data, cfg);
  CHECK(res.points.size() == 10);
  CHECK(res.model.meta.auc >= 0.95);
  CHECK(std::isfinite(res.model.thresholds.theta_f1));
  CHECK(std::isfinite(res.model.thresholds.theta_recall));

  cfg.c_grid = {0.5};
  const auto single = grid_search(data, cfg);
  const auto [train, holdout] = split_holdout(data, cfg.holdout_fraction, cfg.fit.seed);
  const auto direct = train_logistic(train, 0.5, cfg.fit);
  CHECK(single.model.weights == direct.weights);
  CHECK(single.model.bias == direct.bias);
  std::vector<double> scores;
  for (const auto& x : holdout.x) scores.push_back(direct.predict_proba(x));
  CHECK(single.model.thresholds.theta_f1 == select_threshold(scores, holdout.y, ThresholdCriterion::kF1).theta);

  cfg.c_grid = {0.01, 1.0, 100.0};
  const auto dedup = grid_search(data, cfg);
  cfg.c_grid = {0.01, 1.0, 1.0, 100.0, 0.01};
  const auto dup = grid_search(data, cfg);
  CHECK(dup.model.meta.c == dedup.model.meta.c);
  CHECK(dup.model.weights == dedup.model.weights);

  cfg.workers = 3;
  const auto parallel = grid_search(data, cfg);
  CHECK(parallel.model.serialize() == dup.model.serialize());
}

TEST_CASE("split_holdout: stratified and seeded") {
  const auto data = sjtest::planted_data(101, 8);
  const auto [tr, ho] = split_holdout(data, 0.2, 3);
  CHECK(tr.size() + ho.size() == data.size());
  std::size_t pos = 0, ho_pos = 0;
  for (auto v : data.y) pos += v;
  for (auto v : ho.y) ho_pos += v;
  CHECK(ho_pos == static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(pos))));
  const auto [tr2, ho2] = split_holdout(data, 0.2, 3);
  CHECK(ho2.x == ho.x);
  CHECK_THROWS_AS(split_holdout(data, 0.0, 3), Error);
}

TEST_CASE("verifier file: bit-exact round trip and determinism") {
  const auto data = sjtest::planted_data(300, 31);
  TrainConfig cfg;
  cfg.c_grid = {0.1, 10.0};
  cfg.fit.standardize = true;
  const auto a = grid_search(data, cfg).model;
  const auto b = grid_search(data, cfg).model;
  CHECK(a.serialize("{}") == b.serialize("{}"));
  const auto dir = sjtest::scratch_dir("verifier");
  a.save(dir / "v.json", R"({"seed": 1})");
  const auto back = JudgeModel::load(dir / "v.json");
  CHECK(back.weights == a.weights);
  CHECK(back.bias == a.bias);
  CHECK(back.thresholds.theta_f1 == a.thresholds.theta_f1);
  CHECK(back.thresholds.theta_recall == a.thresholds.theta_recall);
  CHECK(back.meta.auc == a.meta.auc);
  CHECK(back.standardization.mean == a.standardization.mean);
  CHECK(back.standardization.scale == a.standardization.scale);
  CHECK(back.serialize(R"({"seed": 1})") == sjtest::slurp(dir / "v.json"));
  for (const auto& x : data.x) CHECK(back.predict_proba(x) == a.predict_proba(x));
  CHECK_THROWS_AS(JudgeModel::deserialize("not json"), Error);
}
