// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specjudge/specjudge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> policies;
  std::optional<int> gamma;
  std::optional<double> temperature;
  std::vector<std::string> thetas;
  std::vector<std::string> overrides;
  std::optional<int> workers;
  bool negative_control = false;
};

class ConfigHandle {
 public:
  ~ConfigHandle() { sj_config_free(ptr_); }
  sj_config** out() { return &ptr_; }
  sj_config* get() const { return ptr_; }

 private:
  sj_config* ptr_ = nullptr;
};

// Usage problems exit 2; every other failure exits 1.
int report_error(sj_status status) {
  std::fprintf(stderr, "error (%s): %s\n", sj_status_name(status), sj_last_error());
  return status == SJ_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailed;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string json_string_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + json_string(items[i]);
  return out + "]";
}

sj_status build_config(const Options& o, ConfigHandle& cfg) {
  sj_status st = o.config_path.empty() ? sj_config_create_default(cfg.out())
                                       : sj_config_load(o.config_path.c_str(), cfg.out());
  if (st != SJ_OK) return st;
  std::vector<std::pair<std::string, std::string>> sets;
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "--set expects key=value, got '%s'\n", kv.c_str());
      return SJ_ERR_INVALID_ARGUMENT;
    }
    sets.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) sets.emplace_back("seed", std::to_string(*o.seed));
  if (o.out) sets.emplace_back("out", json_string(*o.out));
  if (o.workers) sets.emplace_back("workers", std::to_string(*o.workers));
  if (!o.policies.empty()) sets.emplace_back("decode.policies", json_string_list(o.policies));
  if (o.gamma) sets.emplace_back("decode.gamma", std::to_string(*o.gamma));
  if (o.temperature) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *o.temperature);
    sets.emplace_back("decode.temperature", buf);
  }
  if (!o.thetas.empty()) sets.emplace_back("decode.thetas", json_string_list(o.thetas));
  for (const auto& [k, v] : sets) {
    if ((st = sj_config_set(cfg.get(), k.c_str(), v.c_str())) != SJ_OK) return st;
  }
  return SJ_OK;
}

int run(const std::string& command, const Options& o) {
  ConfigHandle cfg;
  if (sj_status st = build_config(o, cfg); st != SJ_OK) return report_error(st);

  if (command == "train-models") {
    if (sj_status st = sj_train_models(cfg.get()); st != SJ_OK) return report_error(st);
    std::printf("wrote target and draft models\n");
    return kExitOk;
  }
  if (command == "gen-labels") {
    sj_label_summary s{};
    if (sj_status st = sj_gen_labels(cfg.get(), &s); st != SJ_OK) return report_error(st);
    std::printf("prompts %zu  mismatches %zu  acceptable %zu  tau %.6g  N %zu\n", s.num_prompts,
                s.num_mismatches, s.num_acceptable, s.tau, s.suffix_len);
    return kExitOk;
  }
  if (command == "train-judge") {
    sj_judge_summary s{};
    if (sj_status st = sj_train_judge(cfg.get(), &s); st != SJ_OK) return report_error(st);
    std::printf("examples %zu  C %.6g  holdout AUC %.6f  theta_recall %.6g  theta_f1 %.6g\n",
                s.examples, s.c, s.holdout_auc, s.theta_recall, s.theta_f1);
    if (s.threshold_warning) std::printf("warning: recall target unattainable on holdout\n");
    return kExitOk;
  }
  if (command == "eval") {
    sj_report* report = nullptr;
    if (sj_status st = sj_eval(cfg.get(), &report); st != SJ_OK) return report_error(st);
    char* table = nullptr;
    const sj_status st = sj_report_render(report, 1, &table);
    sj_report_free(report);
    if (st != SJ_OK) return report_error(st);
    std::fputs(table, stdout);
    sj_string_free(table);
    return kExitOk;
  }
  if (command == "check-distribution") {
    int code = kExitOk;
    for (const char* policy : {"rejection", "accept-all"}) {
      if (!o.negative_control && std::string(policy) == "accept-all") break;
      sj_distribution_check c{};
      if (sj_status st = sj_check_distribution(cfg.get(), policy, &c); st != SJ_OK) {
        return report_error(st);
      }
      std::printf("%-10s TV %.5f (bound %.3g, %zu samples, %zu outcomes): %s\n", policy, c.tv,
                  c.tolerance, c.samples, c.outcomes, c.passed ? "PASS" : "FAIL");
      if (!c.passed && std::string(policy) == "rejection") code = kExitFailed;
    }
    return code;
  }
  if (command == "check-theorem") {
    sj_theorem_check c{};
    if (sj_status st = sj_check_theorem(cfg.get(), &c); st != SJ_OK) return report_error(st);
    std::printf("trials %zu  violations %zu  strict cases %zu  strict failures %zu  "
                "max gap %.3g: %s\n",
                c.trials, c.violations, c.strict_required, c.strict_failures, c.max_gap,
                c.passed ? "PASS" : "FAIL");
    return c.passed ? kExitOk : kExitFailed;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specjudge: speculative decoding with a learned judge verifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sj_version()));

  Options o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train-models", "train target and draft n-gram models"},
      {"gen-labels", "mine mismatches and write the labelled dataset"},
      {"train-judge", "fit the logistic verifier and calibrate thresholds"},
      {"eval", "decode held-out prompts under each policy and write reports"},
      {"check-distribution", "Monte Carlo vs exact target distribution test"},
      {"check-theorem", "conditional-entropy property suite"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "global seed");
    sub->add_option("--out", o.out, "artifact directory");
    sub->add_option("--set", o.overrides, "override a config key (key=value, repeatable)");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1, 1024));
    if (name == "eval") {
      sub->add_option("--policy", o.policies,
                      "rejection | greedy | topk[:k] | judge | accept-all (repeatable)");
      sub->add_option("--gamma", o.gamma, "draft tokens per cycle")->check(CLI::Range(1, 1 << 16));
      sub->add_option("--temperature", o.temperature, "sampling temperature")
          ->check(CLI::NonNegativeNumber);
      sub->add_option("--theta", o.thetas, "judge threshold: recall | f1 | <number> (repeatable)");
    }
    if (name == "check-distribution") {
      sub->add_flag("--negative-control", o.negative_control,
                    "also run the accept-all policy, which should fail");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  return run(app.get_subcommands().front()->get_name(), o);
}
