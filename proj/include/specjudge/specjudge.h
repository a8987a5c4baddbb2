/* Copyright 2026 The specjudge Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the specjudge library. All functions return an sj_status;
 * on failure sj_last_error() describes the problem for the calling thread.
 * Handles are opaque and must be released with the matching *_free call.
 * Strings returned through char** are owned by the caller (sj_string_free).
 */
#ifndef SPECJUDGE_SPECJUDGE_H_
#define SPECJUDGE_SPECJUDGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SJ_API __declspec(dllexport)
#else
#define SJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sj_status {
  SJ_OK = 0,
  SJ_ERR_INVALID_ARGUMENT = 1,
  SJ_ERR_IO = 2,
  SJ_ERR_FORMAT = 3,
  SJ_ERR_STATE = 4,
  SJ_ERR_INTERNAL = 5
} sj_status;

typedef struct sj_config sj_config;
typedef struct sj_model sj_model;
typedef struct sj_judge sj_judge;
typedef struct sj_report sj_report;

SJ_API const char* sj_version(void);
SJ_API const char* sj_status_name(sj_status status);
/* Message for the last failed call on this thread; "" if none. */
SJ_API const char* sj_last_error(void);
SJ_API void sj_string_free(char* s);

/* ---- configuration ---- */
SJ_API sj_status sj_config_create_default(sj_config** out);
/* Defaults overlaid with a JSON config file. */
SJ_API sj_status sj_config_load(const char* path, sj_config** out);
/* Dotted-key override, e.g. ("decode.gamma", "4"). The value is parsed as
 * JSON when possible and stored as a string otherwise. */
SJ_API sj_status sj_config_set(sj_config* config, const char* key, const char* value);
/* JSON text of a key, or of the whole document when key is NULL. */
SJ_API sj_status sj_config_get(const sj_config* config, const char* key, char** out_json);
SJ_API void sj_config_free(sj_config* config);

/* ---- pipeline commands (artifacts go to the configured "out" directory) ---- */
typedef struct sj_label_summary {
  size_t num_prompts;
  size_t num_mismatches;
  size_t num_acceptable;
  double tau;
  size_t suffix_len;
} sj_label_summary;

typedef struct sj_judge_summary {
  size_t examples;
  double c;
  double holdout_auc;
  double theta_recall;
  double theta_f1;
  int threshold_warning; /* recall target was unattainable */
} sj_judge_summary;

typedef struct sj_eval_row {
  const char* policy; /* valid while the report is alive */
  double m;
  double mean_accepted_draft;
  double exact_match_rate;
  double mean_loglik;
  long long cycles;
  long long total_emitted;
  size_t prompts;
  double wall_time_s;
} sj_eval_row;

typedef struct sj_distribution_check {
  double tv;
  double tolerance;
  size_t samples;
  size_t outcomes;
  int passed;
} sj_distribution_check;

typedef struct sj_theorem_check {
  size_t trials;
  size_t violations;
  size_t strict_required;
  size_t strict_failures;
  double max_gap;
  int passed;
} sj_theorem_check;

SJ_API sj_status sj_train_models(const sj_config* config);
SJ_API sj_status sj_gen_labels(const sj_config* config, sj_label_summary* out);
SJ_API sj_status sj_train_judge(const sj_config* config, sj_judge_summary* out);
SJ_API sj_status sj_eval(const sj_config* config, sj_report** out);
/* policy: "rejection" or "accept-all". */
SJ_API sj_status sj_check_distribution(const sj_config* config, const char* policy,
                                       sj_distribution_check* out);
SJ_API sj_status sj_check_theorem(const sj_config* config, sj_theorem_check* out);

SJ_API size_t sj_report_size(const sj_report* report);
SJ_API sj_status sj_report_row(const sj_report* report, size_t index, sj_eval_row* out);
SJ_API sj_status sj_report_render(const sj_report* report, int with_wall_time, char** out);
SJ_API void sj_report_free(sj_report* report);

/* ---- models ---- */
SJ_API sj_status sj_model_load(const char* path, sj_model** out);
SJ_API void sj_model_free(sj_model* model);
SJ_API size_t sj_model_vocab_size(const sj_model* model);
SJ_API int sj_model_order(const sj_model* model);
/* Writes vocab_size probabilities to out (capacity out_len). */
SJ_API sj_status sj_model_next_distribution(const sj_model* model, const int32_t* prefix,
                                            size_t prefix_len, double* out, size_t out_len);
SJ_API sj_status sj_model_sequence_logprob(const sj_model* model, const int32_t* prefix,
                                           size_t prefix_len, const int32_t* continuation,
                                           size_t continuation_len, double* out);

SJ_API sj_status sj_judge_load(const char* path, sj_judge** out);
SJ_API void sj_judge_free(sj_judge* judge);
SJ_API size_t sj_judge_feature_dim(const sj_judge* judge);
SJ_API sj_status sj_judge_predict(const sj_judge* judge, const double* features, size_t len,
                                  double* out);
/* theta_spec: "f1", "recall" or a number. */
SJ_API sj_status sj_judge_theta(const sj_judge* judge, const char* theta_spec, double* out);

/* ---- speculative decoding ---- */
typedef struct sj_decode_options {
  const char* policy; /* "rejection", "greedy", "topk[:k]", "judge", "accept-all" */
  int gamma;
  int max_new_tokens;
  double temperature;
  uint64_t seed;
  int topk;          /* used by "topk" without an explicit k */
  double theta;      /* judge threshold */
  int32_t stop_token; /* -1 for none */
} sj_decode_options;

typedef struct sj_decode_stats {
  int cycles;
  int total_emitted;
  long long total_accepted;
  double mean_accepted_draft;
  double m;
} sj_decode_stats;

SJ_API void sj_decode_options_init(sj_decode_options* options);

/* judge may be NULL unless the policy is "judge". Writes up to out_cap
 * tokens; *out_len receives the full number of generated tokens. */
SJ_API sj_status sj_decode(const sj_model* target, const sj_model* draft, const sj_judge* judge,
                           const sj_decode_options* options, const int32_t* prompt,
                           size_t prompt_len, int32_t* out_tokens, size_t out_cap,
                           size_t* out_len, sj_decode_stats* stats);

#ifdef __cplusplus
}
#endif

#endif /* SPECJUDGE_SPECJUDGE_H_ */
