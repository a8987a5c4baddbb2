// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "specjudge/chain.hpp"
#include "specjudge/info_theory.hpp"
#include "specjudge/judge.hpp"
#include "specjudge/ngram_model.hpp"
#include "specjudge/semlabel.hpp"
#include "specjudge/specdec.hpp"

namespace specjudge::harness {

// Structured key-value configuration. Defaults are overlaid by a config file
// and then by dotted-key overrides ("decode.gamma=4"). The resolved document,
// minus the runtime-only keys "out" and "workers", is echoed into every
// artifact so outputs do not depend on where or how wide a run was.
class PipelineConfig {
 public:
  static PipelineConfig defaults();
  static PipelineConfig from_file(const std::filesystem::path& path);

  // `value` is parsed as JSON when possible, otherwise stored as a string.
  void set(const std::string& dotted_key, const std::string& value);
  void set_json(const std::string& dotted_key, nlohmann::ordered_json value);

  const nlohmann::ordered_json& doc() const noexcept { return doc_; }
  const nlohmann::ordered_json& at(const std::string& dotted_key) const;
  nlohmann::ordered_json provenance() const;
  std::string echo() const { return provenance().dump(); }

  std::uint64_t seed() const;
  std::filesystem::path out_dir() const;
  int workers() const;

 private:
  nlohmann::ordered_json doc_;
};

struct Corpus {
  Vocab vocab;
  std::vector<TokenSeq> sequences;
  Tokenization tokenization = Tokenization::kCharacter;
  std::optional<MarkovChain> chain;  // set for the synthetic corpus
};

// Synthetic corpus from the reference chain, or a plain-text file with one
// sequence per line. `vocab` (when given) is used to encode text corpora.
Corpus load_corpus(const PipelineConfig& config, const Vocab* vocab = nullptr);

struct PromptSets {
  std::vector<semlabel::Prompt> label;
  std::vector<semlabel::Prompt> eval;
};

// Deterministic label-generation and evaluation prompts; the two sets never
// share a token sequence (checked on every call).
PromptSets make_prompts(const PipelineConfig& config, const Corpus& corpus);
void assert_disjoint(const PromptSets& prompts);

struct ArtifactPaths {
  std::filesystem::path target_model, draft_model, dataset, dataset_summary, verifier, report,
      report_text, traces, eval_prompts, timing;
};
ArtifactPaths artifact_paths(const PipelineConfig& config);

void cmd_train_models(const PipelineConfig& config);

semlabel::DatasetSummary cmd_gen_labels(const PipelineConfig& config);

struct JudgeTraining {
  judge::GridResult grid;
  std::size_t examples = 0;
};
JudgeTraining cmd_train_judge(const PipelineConfig& config);

struct EvalRow {
  std::string policy;
  double m = 0.0;
  double mean_accepted_draft = 0.0;
  double exact_match_rate = 0.0;
  double mean_loglik = 0.0;  // target log-likelihood per emitted token
  long long cycles = 0;
  long long total_emitted = 0;
  std::size_t prompts = 0;
  double wall_time_s = 0.0;  // not written to deterministic artifacts
};

struct EvalReport {
  std::vector<EvalRow> rows;

  const EvalRow* find(const std::string& policy) const;
  std::string render(bool with_wall_time = true) const;
};

// Runs every configured policy (decode.policies; judge rows per entry of
// decode.thetas) over the evaluation prompts with shared per-prompt seeds.
EvalReport cmd_eval(const PipelineConfig& config);

// Recomputes report rows from the stored traces and evaluation prompt file.
EvalReport reduce_traces(const NGramModel& target, const std::filesystem::path& eval_prompts,
                         const std::filesystem::path& traces, int max_new_tokens,
                         TokenId stop_token);

struct DistributionCheck {
  double tv = 0.0;
  double tolerance = 0.02;
  std::size_t samples = 0;
  std::size_t outcomes = 0;
  std::string policy;
  bool passed() const { return tv < tolerance; }
};

// Exact target sequence distribution by enumeration versus Monte Carlo
// speculative decoding at temperature 1. `policy` is "rejection" or
// "accept-all" (negative control).
DistributionCheck cmd_check_distribution(const PipelineConfig& config,
                                         const std::string& policy = "rejection");

// Exact distribution over all length-`length` continuations of `prompt`.
std::vector<double> enumerate_sequences(const NGramModel& target, std::span<const TokenId> prompt,
                                        std::size_t length, double temperature);

info::TheoremCheck cmd_check_theorem(const PipelineConfig& config);

// Parses "rejection", "greedy", "topk[:k]", "judge", "accept-all".
specdec::Policy parse_policy(const std::string& name, int default_k);

// "f1", "recall" or a number.
double resolve_theta(const std::string& spec, const judge::JudgeModel& judge);

}  // namespace specjudge::harness
