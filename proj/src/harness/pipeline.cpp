// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "specjudge/error.hpp"
#include "specjudge/harness.hpp"
#include "specjudge/parallel.hpp"

namespace specjudge::harness {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

template <typename T>
T get(const PipelineConfig& config, const std::string& key) {
  try {
    return config.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail("config key '" + key + "': " + e.what());
  }
}

// Accepts numbers plus the strings "inf" / "-inf".
double get_real(const PipelineConfig& config, const std::string& key) {
  const auto& v = config.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  fail("config key '" + key + "' must be a number");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Tokenization tokenization_of(const PipelineConfig& config) {
  const auto mode = get<std::string>(config, "corpus.tokenization");
  if (mode == "char") return Tokenization::kCharacter;
  if (mode == "whitespace") return Tokenization::kWhitespace;
  fail("corpus.tokenization must be 'char' or 'whitespace'");
}

NGramModel load_model(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::kState, "missing model file " + path.string());
  return NGramModel::load(path);
}

specdec::DecodeConfig decode_config(const PipelineConfig& config) {
  specdec::DecodeConfig dc;
  dc.gamma = get<int>(config, "decode.gamma");
  dc.max_new_tokens = get<int>(config, "decode.max_new_tokens");
  dc.temperature = get_real(config, "decode.temperature");
  dc.stop_token = get<TokenId>(config, "decode.stop_token");
  if (dc.gamma < 1) fail("decode.gamma must be >= 1");
  if (dc.max_new_tokens < 1) fail("decode.max_new_tokens must be >= 1");
  if (!(dc.temperature >= 0.0)) fail("decode.temperature must be >= 0");
  return dc;
}

std::string row_json(const EvalRow& row) {
  ojson rec;
  rec["record"] = "row";
  rec["policy"] = row.policy;
  rec["m"] = row.m;
  rec["mean_accepted_draft"] = row.mean_accepted_draft;
  rec["exact_match_rate"] = row.exact_match_rate;
  rec["mean_loglik"] = row.mean_loglik;
  rec["cycles"] = row.cycles;
  rec["total_emitted"] = row.total_emitted;
  rec["prompts"] = row.prompts;
  return rec.dump();
}

}  // namespace

Corpus load_corpus(const PipelineConfig& config, const Vocab* vocab) {
  Corpus corpus;
  corpus.tokenization = tokenization_of(config);
  const auto path = get<std::string>(config, "corpus.path");
  if (path == "synthetic") {
    const auto v = get<std::size_t>(config, "corpus.synthetic.vocab_size");
    const auto chain_order = get<std::size_t>(config, "corpus.synthetic.chain_order");
    if (chain_order < 1) fail("corpus.synthetic.chain_order must be >= 1");
    corpus.chain = MarkovChain::random(v, chain_order - 1,
                                       get_real(config, "corpus.synthetic.sharpness"),
                                       get<std::uint64_t>(config, "corpus.synthetic.chain_seed"));
    corpus.sequences = corpus.chain->sample_corpus(
        get<std::size_t>(config, "corpus.synthetic.num_sequences"),
        get<std::size_t>(config, "corpus.synthetic.length"), mix_seed(config.seed(), 0));
    corpus.vocab = synthetic_vocab(v);
    if (vocab && !(*vocab == corpus.vocab)) fail(ErrorKind::kState, "model vocab does not match corpus");
    return corpus;
  }
  std::vector<std::string> lines;
  for (auto& line : read_lines(path)) {
    if (!split_tokens(line, corpus.tokenization).empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) fail("empty corpus");
  corpus.vocab = vocab ? *vocab : build_vocab(lines, corpus.tokenization);
  for (const auto& line : lines) {
    corpus.sequences.push_back(encode(corpus.vocab, line, corpus.tokenization));
  }
  return corpus;
}

void assert_disjoint(const PromptSets& prompts) {
  std::set<TokenSeq> label;
  for (const auto& p : prompts.label) label.insert(p.tokens);
  for (const auto& p : prompts.eval) {
    if (label.count(p.tokens)) fail(ErrorKind::kState, "evaluation prompt overlaps label prompts");
  }
}

PromptSets make_prompts(const PipelineConfig& config, const Corpus& corpus) {
  const auto num_label = get<std::size_t>(config, "prompts.num_label");
  const auto num_eval = get<std::size_t>(config, "prompts.num_eval");
  const auto len = get<std::size_t>(config, "prompts.length");
  if (len < 1) fail("prompts.length must be >= 1");
  PromptSets sets;
  std::set<TokenSeq> label_seen;

  if (corpus.chain) {
    Rng label_rng(mix_seed(config.seed(), 1));
    for (std::size_t i = 0; i < num_label; ++i) {
      auto tokens = corpus.chain->sample(len, label_rng);
      label_seen.insert(tokens);
      sets.label.push_back({static_cast<int>(i), std::move(tokens)});
    }
    Rng eval_rng(mix_seed(config.seed(), 2));
    std::size_t attempts = 0;
    while (sets.eval.size() < num_eval) {
      if (++attempts > 100 * (num_eval + 1)) fail("cannot draw enough disjoint eval prompts");
      auto tokens = corpus.chain->sample(len, eval_rng);
      if (label_seen.count(tokens)) continue;
      sets.eval.push_back({static_cast<int>(sets.eval.size()), std::move(tokens)});
    }
  } else {
    // Every fifth corpus line is an evaluation candidate.
    std::vector<TokenSeq> label_pool, eval_pool;
    for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
      const auto& seq = corpus.sequences[i];
      if (seq.size() < len + 1) continue;
      TokenSeq head(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(len));
      (i % 5 == 4 ? eval_pool : label_pool).push_back(std::move(head));
    }
    for (auto& tokens : label_pool) {
      if (sets.label.size() >= num_label) break;
      label_seen.insert(tokens);
      sets.label.push_back({static_cast<int>(sets.label.size()), std::move(tokens)});
    }
    for (auto& tokens : eval_pool) {
      if (sets.eval.size() >= num_eval) break;
      if (label_seen.count(tokens)) continue;
      sets.eval.push_back({static_cast<int>(sets.eval.size()), std::move(tokens)});
    }
  }
  assert_disjoint(sets);
  return sets;
}

ArtifactPaths artifact_paths(const PipelineConfig& config) {
  const fs::path dir = config.out_dir();
  return {dir / "target_model.json", dir / "draft_model.json", dir / "dataset.jsonl",
          dir / "dataset_summary.json", dir / "verifier.json", dir / "report.jsonl",
          dir / "report.txt", dir / "traces.jsonl", dir / "eval_prompts.jsonl",
          dir / "timing.jsonl"};
}

void cmd_train_models(const PipelineConfig& config) {
  const Corpus corpus = load_corpus(config);
  const auto paths = artifact_paths(config);
  fs::create_directories(config.out_dir());
  const auto target = NGramModel::train(corpus.vocab, corpus.sequences,
                                        get<int>(config, "target.order"),
                                        get_real(config, "target.alpha"));
  const auto draft = NGramModel::train(corpus.vocab, corpus.sequences,
                                       get<int>(config, "draft.order"),
                                       get_real(config, "draft.alpha"));
  target.save(paths.target_model, config.echo());
  draft.save(paths.draft_model, config.echo());
}

semlabel::DatasetSummary cmd_gen_labels(const PipelineConfig& config) {
  const auto paths = artifact_paths(config);
  const NGramModel target = load_model(paths.target_model);
  const NGramModel draft = load_model(paths.draft_model);
  const Corpus corpus = load_corpus(config, &target.vocab());
  const PromptSets prompts = make_prompts(config, corpus);

  semlabel::LabelConfig lc;
  lc.suffix_len = get<std::size_t>(config, "label.N");
  lc.calibration_quantile = get_real(config, "label.calibration_quantile");
  lc.horizon = get<std::size_t>(config, "label.horizon");
  semlabel::BuildOptions options;
  options.max_response_len = get<std::size_t>(config, "label.max_response_len");
  options.stop_token = get<TokenId>(config, "decode.stop_token");
  options.workers = config.workers();

  const auto& tau_cfg = config.at("label.tau");
  const bool auto_tau = tau_cfg.is_string() && tau_cfg.get<std::string>() == "auto";
  lc.tau = auto_tau ? semlabel::calibrate_tau_from_oracle(target, draft, prompts.label, lc, options)
                    : get_real(config, "label.tau");

  const FeatureExtractor features(target, draft);
  const auto dataset =
      semlabel::build_dataset(target, draft, features, prompts.label, lc, options);

  std::string body;
  for (const auto& ex : dataset.examples) body += semlabel::example_record(ex) + "\n";
  fs::create_directories(config.out_dir());
  write_text(paths.dataset, body);

  ojson summary;
  summary["num_prompts"] = dataset.summary.num_prompts;
  summary["num_mismatches"] = dataset.summary.num_mismatches;
  summary["num_acceptable"] = dataset.summary.num_acceptable;
  summary["tau"] = dataset.summary.tau;  // non-finite tau serializes as null
  summary["tau_source"] = auto_tau ? "oracle_quantile" : "config";
  summary["N"] = dataset.summary.suffix_len;
  summary["seed"] = config.seed();
  summary["config"] = config.provenance();
  write_text(paths.dataset_summary, summary.dump(1) + "\n");
  return dataset.summary;
}

JudgeTraining cmd_train_judge(const PipelineConfig& config) {
  const auto paths = artifact_paths(config);
  if (!fs::exists(paths.dataset)) fail(ErrorKind::kState, "missing dataset " + paths.dataset.string());
  judge::TrainingSet data;
  for (const auto& line : read_lines(paths.dataset)) {
    if (line.empty()) continue;
    auto ex = semlabel::parse_example_record(line);
    data.x.push_back(std::move(ex.features));
    data.y.push_back(ex.label ? 1 : 0);
  }
  judge::TrainConfig tc;
  tc.c_grid = get<std::vector<double>>(config, "train.c_grid");
  tc.holdout_fraction = get_real(config, "train.holdout_fraction");
  tc.fit.max_iter = get<int>(config, "train.max_iter");
  tc.fit.tol = get_real(config, "train.tol");
  tc.fit.seed = config.seed();
  tc.fit.standardize = get<bool>(config, "train.standardize");
  tc.target_recall = get_real(config, "train.target_recall");
  tc.workers = config.workers();

  JudgeTraining out;
  out.examples = data.size();
  out.grid = judge::grid_search(data, tc);
  fs::create_directories(config.out_dir());
  out.grid.model.save(paths.verifier, config.echo());
  return out;
}

specdec::Policy parse_policy(const std::string& name, int default_k) {
  specdec::Policy p;
  if (name == "rejection") {
    p.kind = specdec::PolicyKind::kRejection;
  } else if (name == "greedy") {
    p.kind = specdec::PolicyKind::kGreedy;
  } else if (name == "judge") {
    p.kind = specdec::PolicyKind::kJudge;
  } else if (name == "accept-all") {
    p.kind = specdec::PolicyKind::kAcceptAll;
  } else if (name == "topk" || name.rfind("topk:", 0) == 0) {
    p.kind = specdec::PolicyKind::kTopK;
    p.k = default_k;
    if (name.size() > 5) {
      try {
        p.k = std::stoi(name.substr(5));
      } catch (const std::exception&) {
        fail("bad policy '" + name + "'");
      }
    }
  } else {
    fail("unknown policy '" + name + "'");
  }
  return p;
}

double resolve_theta(const std::string& spec, const judge::JudgeModel& judge) {
  double theta;
  if (spec == "f1") {
    theta = judge.thresholds.theta_f1;
  } else if (spec == "recall") {
    theta = judge.thresholds.theta_recall;
  } else if (spec == "inf" || spec == "+inf") {
    theta = INFINITY;
  } else if (spec == "-inf") {
    theta = -INFINITY;
  } else {
    try {
      std::size_t used = 0;
      theta = std::stod(spec, &used);
      if (used != spec.size()) throw std::invalid_argument(spec);
    } catch (const std::exception&) {
      fail("theta must be 'recall', 'f1' or a number, got '" + spec + "'");
    }
  }
  if (std::isnan(theta)) fail(ErrorKind::kState, "verifier has no calibrated '" + spec + "' threshold");
  return theta;
}

const EvalRow* EvalReport::find(const std::string& policy) const {
  for (const auto& r : rows) {
    if (r.policy == policy) return &r;
  }
  return nullptr;
}

std::string EvalReport::render(bool with_wall_time) const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %8s %10s %12s %13s %8s", "policy", "m", "acc/cycle",
                "exact-match", "loglik/token", "cycles");
  out << line << (with_wall_time ? "  wall(s)" : "") << "\n";
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %8.4f %10.4f %11.1f%% %13.5f %8lld",
                  r.policy.c_str(), r.m, r.mean_accepted_draft, 100.0 * r.exact_match_rate,
                  r.mean_loglik, r.cycles);
    out << line;
    if (with_wall_time) {
      std::snprintf(line, sizeof line, "  %7.3f", r.wall_time_s);
      out << line;
    }
    out << "\n";
  }
  return out.str();
}

EvalReport cmd_eval(const PipelineConfig& config) {
  const auto paths = artifact_paths(config);
  const NGramModel target = load_model(paths.target_model);
  const NGramModel draft = load_model(paths.draft_model);
  const Corpus corpus = load_corpus(config, &target.vocab());
  const PromptSets prompts = make_prompts(config, corpus);
  const specdec::DecodeConfig base = decode_config(config);
  const int default_k = get<int>(config, "decode.topk");

  struct Run {
    std::string label;
    specdec::Policy policy;
  };
  std::vector<Run> runs;
  std::optional<judge::JudgeModel> verifier;
  for (const auto& name : get<std::vector<std::string>>(config, "decode.policies")) {
    specdec::Policy policy = parse_policy(name, default_k);
    if (policy.kind != specdec::PolicyKind::kJudge) {
      runs.push_back({policy.name(), policy});
      continue;
    }
    if (!verifier) {
      if (!fs::exists(paths.verifier)) {
        fail(ErrorKind::kState, "judge policy requires verifier file " + paths.verifier.string());
      }
      verifier = judge::JudgeModel::load(paths.verifier);
    }
    for (const auto& spec : get<std::vector<std::string>>(config, "decode.thetas")) {
      specdec::Policy jp = policy;
      jp.theta = resolve_theta(spec, *verifier);
      runs.push_back({"judge@" + spec, jp});
    }
  }
  for (auto& run : runs) run.policy.judge = verifier ? &*verifier : nullptr;

  const specdec::SpeculativeDecoder decoder(target, draft);
  const auto& evals = prompts.eval;
  std::vector<TokenSeq> references;
  std::string prompt_file;
  for (const auto& p : evals) {
    references.push_back(greedy_rollout(target, p.tokens,
                                        static_cast<std::size_t>(base.max_new_tokens),
                                        base.stop_token));
    ojson rec;
    rec["prompt_id"] = p.id;
    rec["prompt"] = p.tokens;
    rec["reference"] = references.back();
    prompt_file += rec.dump() + "\n";
  }

  EvalReport report;
  std::string traces;
  std::string timing;
  for (const auto& run : runs) {
    const auto start = std::chrono::steady_clock::now();
    auto results = parallel_map(evals.size(), config.workers(), [&](std::size_t i) {
      specdec::DecodeConfig dc = base;
      dc.policy = run.policy;
      dc.seed = config.seed() ^ static_cast<std::uint64_t>(evals[i].id);
      return decoder.decode(evals[i].tokens, dc);
    });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    EvalRow row;
    row.policy = run.label;
    row.prompts = evals.size();
    row.wall_time_s = wall;
    double loglik = 0.0;
    long long accepted = 0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& res = results[i];
      row.cycles += res.metrics.cycles;
      accepted += res.metrics.total_accepted;
      row.total_emitted += res.metrics.total_emitted;
      loglik += sequence_logprob(target, res.tokens, evals[i].tokens);
      matches += res.tokens == references[i] ? 1 : 0;
      for (std::size_t c = 0; c < res.traces.size(); ++c) {
        traces += specdec::trace_record(res.traces[c], evals[i].id, static_cast<int>(c),
                                        run.label) + "\n";
      }
    }
    row.mean_accepted_draft = static_cast<double>(accepted) / static_cast<double>(row.cycles);
    row.m = row.mean_accepted_draft + 1.0;
    row.exact_match_rate = static_cast<double>(matches) / static_cast<double>(evals.size());
    row.mean_loglik = loglik / static_cast<double>(row.total_emitted);
    report.rows.push_back(row);

    ojson t;
    t["policy"] = row.policy;
    t["wall_time_s"] = wall;
    timing += t.dump() + "\n";
  }

  fs::create_directories(config.out_dir());
  ojson meta;
  meta["record"] = "meta";
  meta["seed"] = config.seed();
  meta["config"] = config.provenance();
  std::string report_lines = meta.dump() + "\n";
  for (const auto& row : report.rows) report_lines += row_json(row) + "\n";
  write_text(paths.report, report_lines);
  write_text(paths.report_text, report.render(false));
  write_text(paths.traces, traces);
  write_text(paths.eval_prompts, prompt_file);
  write_text(paths.timing, timing);
  return report;
}

EvalReport reduce_traces(const NGramModel& target, const fs::path& eval_prompts,
                         const fs::path& traces, int max_new_tokens, TokenId stop_token) {
  struct PromptInfo {
    TokenSeq prompt, reference;
  };
  std::map<int, PromptInfo> prompts;
  for (const auto& line : read_lines(eval_prompts)) {
    if (line.empty()) continue;
    const auto rec = ojson::parse(line);
    prompts[rec.at("prompt_id").get<int>()] = {rec.at("prompt").get<TokenSeq>(),
                                               rec.at("reference").get<TokenSeq>()};
  }

  struct Acc {
    long long cycles = 0, accepted = 0;
    std::map<int, TokenSeq> outputs;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> by_policy;
  for (const auto& line : read_lines(traces)) {
    if (line.empty()) continue;
    const auto rec = ojson::parse(line);
    const auto policy = rec.at("policy").get<std::string>();
    if (!by_policy.count(policy)) order.push_back(policy);
    Acc& acc = by_policy[policy];
    ++acc.cycles;
    acc.accepted += rec.at("accepted_count").get<long long>();
    TokenSeq& out = acc.outputs[rec.at("prompt_id").get<int>()];
    for (TokenId tok : rec.at("emitted").get<TokenSeq>()) {
      const bool done = static_cast<int>(out.size()) >= max_new_tokens ||
                        (!out.empty() && out.back() == stop_token);
      if (done) break;
      out.push_back(tok);
    }
  }

  EvalReport report;
  for (const auto& policy : order) {
    const Acc& acc = by_policy[policy];
    EvalRow row;
    row.policy = policy;
    row.cycles = acc.cycles;
    row.prompts = acc.outputs.size();
    std::size_t matches = 0;
    double loglik = 0.0;
    for (const auto& [id, out] : acc.outputs) {
      const PromptInfo& info = prompts.at(id);
      matches += out == info.reference ? 1 : 0;
      loglik += sequence_logprob(target, out, info.prompt);
      row.total_emitted += static_cast<long long>(out.size());
    }
    row.mean_accepted_draft = static_cast<double>(acc.accepted) / static_cast<double>(acc.cycles);
    row.m = row.mean_accepted_draft + 1.0;
    row.exact_match_rate = static_cast<double>(matches) / static_cast<double>(row.prompts);
    row.mean_loglik = loglik / static_cast<double>(row.total_emitted);
    report.rows.push_back(row);
  }
  return report;
}

std::vector<double> enumerate_sequences(const NGramModel& target, std::span<const TokenId> prompt,
                                        std::size_t length, double temperature) {
  const std::size_t v = target.vocab_size();
  std::size_t outcomes = 1;
  for (std::size_t i = 0; i < length; ++i) outcomes *= v;
  std::vector<double> probs(outcomes);
  TokenSeq seq(length);
  for (std::size_t idx = 0; idx < outcomes; ++idx) {
    std::size_t rest = idx;
    for (std::size_t pos = length; pos-- > 0;) {
      seq[pos] = static_cast<TokenId>(rest % v);
      rest /= v;
    }
    TokenSeq ctx(prompt.begin(), prompt.end());
    double p = 1.0;
    for (TokenId tok : seq) {
      p *= apply_temperature(target.next_distribution(ctx), temperature)[tok];
      ctx.push_back(tok);
    }
    probs[idx] = p;
  }
  return probs;
}

DistributionCheck cmd_check_distribution(const PipelineConfig& config, const std::string& policy) {
  const std::string sec = "check_distribution.";
  const auto v = get<std::size_t>(config, sec + "vocab_size");
  const auto length = get<std::size_t>(config, sec + "length");
  if (v < 2 || v > 8) fail("check-distribution requires 2 <= vocab_size <= 8");
  if (length < 1 || length > 4) fail("check-distribution requires 1 <= length <= 4");
  const double temperature = get_real(config, sec + "temperature");
  if (!(temperature > 0.0)) fail("check-distribution requires temperature > 0");
  const auto chain_order = get<std::size_t>(config, sec + "chain_order");
  if (chain_order < 1) fail("check_distribution.chain_order must be >= 1");

  const auto chain = MarkovChain::random(v, chain_order - 1, get_real(config, sec + "sharpness"),
                                         get<std::uint64_t>(config, sec + "chain_seed"));
  const auto corpus = chain.sample_corpus(get<std::size_t>(config, sec + "corpus_sequences"),
                                          get<std::size_t>(config, sec + "corpus_length"),
                                          mix_seed(config.seed(), 3));
  const Vocab vocab = synthetic_vocab(v);
  const double alpha = get_real(config, sec + "alpha");
  const auto target = NGramModel::train(vocab, corpus, get<int>(config, sec + "target_order"), alpha);
  const auto draft = NGramModel::train(vocab, corpus, get<int>(config, sec + "draft_order"), alpha);
  const auto prompt = get<TokenSeq>(config, sec + "prompt");
  for (TokenId t : prompt) {
    if (!vocab.contains(t)) fail("check_distribution.prompt has unknown token");
  }

  const auto exact = enumerate_sequences(target, prompt, length, temperature);
  const specdec::SpeculativeDecoder decoder(target, draft);
  specdec::DecodeConfig dc;
  dc.gamma = get<int>(config, sec + "gamma");
  dc.max_new_tokens = static_cast<int>(length);
  dc.temperature = temperature;
  dc.policy = parse_policy(policy, 1);
  if (dc.policy.kind == specdec::PolicyKind::kJudge) {
    fail("check-distribution supports alignment policies and accept-all only");
  }

  const auto samples = get<std::size_t>(config, sec + "samples");
  if (samples == 0) fail("check_distribution.samples must be > 0");
  std::vector<std::size_t> counts(exact.size(), 0);
  const std::uint64_t base_seed = mix_seed(config.seed(), 4);
  for (std::size_t s = 0; s < samples; ++s) {
    dc.seed = base_seed + s;
    const auto res = decoder.decode(prompt, dc);
    std::size_t idx = 0;
    for (TokenId tok : res.tokens) idx = idx * v + static_cast<std::size_t>(tok);
    ++counts[idx];
  }

  DistributionCheck out;
  out.samples = samples;
  out.outcomes = exact.size();
  out.tolerance = get_real(config, sec + "tolerance");
  out.policy = dc.policy.name();
  double tv = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    tv += std::abs(static_cast<double>(counts[i]) / static_cast<double>(samples) - exact[i]);
  }
  out.tv = 0.5 * tv;
  return out;
}

info::TheoremCheck cmd_check_theorem(const PipelineConfig& config) {
  return info::check_conditioning_reduces_entropy(
      get<std::size_t>(config, "check_theorem.trials"),
      get<std::size_t>(config, "check_theorem.max_support"), config.seed());
}

}  // namespace specjudge::harness
