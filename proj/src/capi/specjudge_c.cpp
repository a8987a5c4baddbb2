// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/specjudge.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "specjudge/error.hpp"
#include "specjudge/harness.hpp"

using namespace specjudge;

struct sj_config {
  harness::PipelineConfig cfg;
};
struct sj_model {
  NGramModel model;
};
struct sj_judge {
  judge::JudgeModel model;
};
struct sj_report {
  harness::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

sj_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return SJ_ERR_INVALID_ARGUMENT;
    case ErrorKind::kIo: return SJ_ERR_IO;
    case ErrorKind::kFormat: return SJ_ERR_FORMAT;
    case ErrorKind::kState: return SJ_ERR_STATE;
  }
  return SJ_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
sj_status guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SJ_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return SJ_ERR_FORMAT;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return SJ_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SJ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SJ_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SJ_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* sj_version(void) { return "0.1.0"; }

const char* sj_status_name(sj_status status) {
  switch (status) {
    case SJ_OK: return "ok";
    case SJ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SJ_ERR_IO: return "io error";
    case SJ_ERR_FORMAT: return "format error";
    case SJ_ERR_STATE: return "state error";
    case SJ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sj_last_error(void) { return g_last_error.c_str(); }

void sj_string_free(char* s) { std::free(s); }

sj_status sj_config_create_default(sj_config** out) {
  return guard([&] {
    require(out, "null output pointer");
    *out = new sj_config{harness::PipelineConfig::defaults()};
  });
}

sj_status sj_config_load(const char* path, sj_config** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new sj_config{harness::PipelineConfig::from_file(path)};
  });
}

sj_status sj_config_set(sj_config* config, const char* key, const char* value) {
  return guard([&] {
    require(config && key && value, "null argument");
    config->cfg.set(key, value);
  });
}

sj_status sj_config_get(const sj_config* config, const char* key, char** out_json) {
  return guard([&] {
    require(config && out_json, "null argument");
    *out_json = dup_string(key ? config->cfg.at(key).dump() : config->cfg.doc().dump());
  });
}

void sj_config_free(sj_config* config) { delete config; }

sj_status sj_train_models(const sj_config* config) {
  return guard([&] {
    require(config, "null config");
    harness::cmd_train_models(config->cfg);
  });
}

sj_status sj_gen_labels(const sj_config* config, sj_label_summary* out) {
  return guard([&] {
    require(config, "null config");
    const auto s = harness::cmd_gen_labels(config->cfg);
    if (out) *out = {s.num_prompts, s.num_mismatches, s.num_acceptable, s.tau, s.suffix_len};
  });
}

sj_status sj_train_judge(const sj_config* config, sj_judge_summary* out) {
  return guard([&] {
    require(config, "null config");
    const auto t = harness::cmd_train_judge(config->cfg);
    const auto& m = t.grid.model;
    if (out) {
      *out = {t.examples, m.meta.c, m.meta.auc, m.thresholds.theta_recall,
              m.thresholds.theta_f1, t.grid.threshold_warning ? 1 : 0};
    }
  });
}

sj_status sj_eval(const sj_config* config, sj_report** out) {
  return guard([&] {
    require(config && out, "null argument");
    *out = new sj_report{harness::cmd_eval(config->cfg)};
  });
}

sj_status sj_check_distribution(const sj_config* config, const char* policy,
                                sj_distribution_check* out) {
  return guard([&] {
    require(config && out, "null argument");
    const auto c = harness::cmd_check_distribution(config->cfg, policy ? policy : "rejection");
    *out = {c.tv, c.tolerance, c.samples, c.outcomes, c.passed() ? 1 : 0};
  });
}

sj_status sj_check_theorem(const sj_config* config, sj_theorem_check* out) {
  return guard([&] {
    require(config && out, "null argument");
    const auto c = harness::cmd_check_theorem(config->cfg);
    *out = {c.trials, c.violations, c.strict_required, c.strict_failures, c.max_gap,
            c.passed() ? 1 : 0};
  });
}

size_t sj_report_size(const sj_report* report) { return report ? report->report.rows.size() : 0; }

sj_status sj_report_row(const sj_report* report, size_t index, sj_eval_row* out) {
  return guard([&] {
    require(report && out, "null argument");
    require(index < report->report.rows.size(), "report row out of range");
    const auto& r = report->report.rows[index];
    *out = {r.policy.c_str(), r.m, r.mean_accepted_draft, r.exact_match_rate, r.mean_loglik,
            r.cycles, r.total_emitted, r.prompts, r.wall_time_s};
  });
}

sj_status sj_report_render(const sj_report* report, int with_wall_time, char** out) {
  return guard([&] {
    require(report && out, "null argument");
    *out = dup_string(report->report.render(with_wall_time != 0));
  });
}

void sj_report_free(sj_report* report) { delete report; }

sj_status sj_model_load(const char* path, sj_model** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new sj_model{NGramModel::load(path)};
  });
}

void sj_model_free(sj_model* model) { delete model; }

size_t sj_model_vocab_size(const sj_model* model) { return model ? model->model.vocab_size() : 0; }

int sj_model_order(const sj_model* model) { return model ? model->model.order() : 0; }

sj_status sj_model_next_distribution(const sj_model* model, const int32_t* prefix,
                                     size_t prefix_len, double* out, size_t out_len) {
  return guard([&] {
    require(model && out && (prefix || prefix_len == 0), "null argument");
    require(out_len >= model->model.vocab_size(), "output buffer smaller than vocabulary");
    const auto dist = model->model.next_distribution({prefix, prefix_len});
    std::copy(dist.probs.begin(), dist.probs.end(), out);
  });
}

sj_status sj_model_sequence_logprob(const sj_model* model, const int32_t* prefix,
                                    size_t prefix_len, const int32_t* continuation,
                                    size_t continuation_len, double* out) {
  return guard([&] {
    require(model && out && (prefix || prefix_len == 0) && continuation, "null argument");
    *out = sequence_logprob(model->model, {continuation, continuation_len}, {prefix, prefix_len});
  });
}

sj_status sj_judge_load(const char* path, sj_judge** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new sj_judge{judge::JudgeModel::load(path)};
  });
}

void sj_judge_free(sj_judge* judge) { delete judge; }

size_t sj_judge_feature_dim(const sj_judge* judge) { return judge ? judge->model.feature_dim() : 0; }

sj_status sj_judge_predict(const sj_judge* judge, const double* features, size_t len,
                           double* out) {
  return guard([&] {
    require(judge && features && out, "null argument");
    *out = judge->model.predict_proba({features, len});
  });
}

sj_status sj_judge_theta(const sj_judge* judge, const char* theta_spec, double* out) {
  return guard([&] {
    require(judge && theta_spec && out, "null argument");
    *out = harness::resolve_theta(theta_spec, judge->model);
  });
}

void sj_decode_options_init(sj_decode_options* options) {
  if (!options) return;
  const specdec::DecodeConfig d;
  *options = {"rejection", d.gamma, d.max_new_tokens, d.temperature, d.seed, 1, d.policy.theta,
              d.stop_token};
}

sj_status sj_decode(const sj_model* target, const sj_model* draft, const sj_judge* judge,
                    const sj_decode_options* options, const int32_t* prompt, size_t prompt_len,
                    int32_t* out_tokens, size_t out_cap, size_t* out_len,
                    sj_decode_stats* stats) {
  return guard([&] {
    require(target && draft && options && options->policy && (prompt || prompt_len == 0),
            "null argument");
    require(out_tokens || out_cap == 0, "null output buffer");
    specdec::DecodeConfig dc;
    dc.gamma = options->gamma;
    dc.max_new_tokens = options->max_new_tokens;
    dc.temperature = options->temperature;
    dc.seed = options->seed;
    dc.stop_token = options->stop_token;
    dc.policy = harness::parse_policy(options->policy, options->topk);
    dc.policy.theta = options->theta;
    if (dc.policy.kind == specdec::PolicyKind::kJudge) {
      require(judge, "judge policy needs a judge handle");
      dc.policy.judge = &judge->model;
    }
    const specdec::SpeculativeDecoder decoder(target->model, draft->model);
    const auto res = decoder.decode({prompt, prompt_len}, dc);
    const size_t n = std::min(out_cap, res.tokens.size());
    std::copy(res.tokens.begin(), res.tokens.begin() + static_cast<std::ptrdiff_t>(n), out_tokens);
    if (out_len) *out_len = res.tokens.size();
    if (stats) {
      *stats = {res.metrics.cycles, res.metrics.total_emitted, res.metrics.total_accepted,
                res.metrics.mean_accepted_draft, res.metrics.mean_emitted_per_cycle};
    }
  });
}

}  // extern "C"
