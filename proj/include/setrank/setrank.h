// Copyright 2026 The setrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the setrank re-ranking engine.
 *
 * All objects are opaque handles created by *_create / *_read functions and
 * released with the matching *_destroy (NULL is accepted). Functions that
 * can fail return a setrank_status; on failure setrank_last_error() holds a
 * message for the calling thread until its next failing call. Strings
 * returned by accessors are owned by the handle they came from.
 */
#ifndef SETRANK_SETRANK_H_
#define SETRANK_SETRANK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SETRANK_BUILDING_LIBRARY)
#define SETRANK_API __attribute__((visibility("default")))
#else
#define SETRANK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum setrank_status {
  SETRANK_OK = 0,
  SETRANK_E_INVALID_ARGUMENT = 1,
  SETRANK_E_CONFIGURATION = 2,
  SETRANK_E_CAPABILITY_UNSUPPORTED = 3,
  SETRANK_E_LABEL_OVERFLOW = 4,
  SETRANK_E_ARITY_MISMATCH = 5,
  SETRANK_E_PARSE = 6,
  SETRANK_E_IO = 7,
  SETRANK_E_TRANSPORT = 8,
  SETRANK_E_NOT_FOUND = 9,
  SETRANK_E_INTERNAL = 10
} setrank_status;

typedef struct setrank_config setrank_config;
typedef struct setrank_oracle setrank_oracle;
typedef struct setrank_candidates setrank_candidates;
typedef struct setrank_result setrank_result;
typedef struct setrank_run setrank_run;
typedef struct setrank_qrels setrank_qrels;
typedef struct setrank_corpus setrank_corpus;
typedef struct setrank_queries setrank_queries;
typedef struct setrank_ndcg_report setrank_ndcg_report;
typedef struct setrank_sim_report setrank_sim_report;

SETRANK_API const char* setrank_version(void);
SETRANK_API const char* setrank_last_error(void);
SETRANK_API const char* setrank_status_name(setrank_status status);

/* Ranker configuration. Defaults: setwise.heapsort, k=10, c=3, w=4, s=2,
 * r=5, generation scoring, per-method document truncation. */
SETRANK_API setrank_status setrank_config_create(setrank_config** out);
SETRANK_API void setrank_config_destroy(setrank_config* config);
SETRANK_API setrank_status setrank_config_set_method(setrank_config* config, const char* name);
/* key: "k", "c", "w", "s", "r" or "max_doc_tokens". */
SETRANK_API setrank_status setrank_config_set_int(setrank_config* config, const char* key,
                                                  int64_t value);
/* "generation" or "logits". */
SETRANK_API setrank_status setrank_config_set_scoring_mode(setrank_config* config,
                                                           const char* mode);
/* Validates against a candidate count; n = 0 checks only N-independent rules. */
SETRANK_API setrank_status setrank_config_validate(const setrank_config* config, size_t n);
/* Worst-case oracle calls at size n. */
SETRANK_API setrank_status setrank_max_inferences(const setrank_config* config, size_t n,
                                                  uint64_t* out);

/* Ground-truth oracle over (doc_id, score) pairs. */
SETRANK_API setrank_status setrank_oracle_create_mock(const char* const* doc_ids,
                                                      const double* scores, size_t n,
                                                      double noise_p, uint64_t seed,
                                                      setrank_oracle** out);

typedef struct setrank_endpoint_options {
  const char* base_url;
  const char* model;
  /* NULL reads SETRANK_API_KEY, then OPENAI_API_KEY. */
  const char* api_key;
  double timeout_seconds;
  int max_retries;
  int supports_logprobs;
  int supports_completions;
  size_t max_parallel;
  /* Directory with replacement prompt templates; NULL uses the built-ins. */
  const char* templates_dir;
} setrank_endpoint_options;

SETRANK_API void setrank_endpoint_options_init(setrank_endpoint_options* options);
SETRANK_API setrank_status setrank_oracle_create_http(const setrank_endpoint_options* options,
                                                      setrank_oracle** out);
SETRANK_API void setrank_oracle_destroy(setrank_oracle* oracle);

SETRANK_API setrank_status setrank_candidates_create(const char* query_id,
                                                     const char* query_text,
                                                     setrank_candidates** out);
SETRANK_API setrank_status setrank_candidates_add(setrank_candidates* candidates,
                                                  const char* doc_id, const char* text);
SETRANK_API size_t setrank_candidates_size(const setrank_candidates* candidates);
SETRANK_API void setrank_candidates_destroy(setrank_candidates* candidates);

typedef struct setrank_ledger {
  uint64_t inferences;
  uint64_t prompt_tokens;
  uint64_t generated_tokens;
  uint64_t parse_failures;
  double wall_seconds;
} setrank_ledger;

/* Re-ranks one query. Safe to call concurrently on distinct candidate
 * lists sharing one oracle and config. */
SETRANK_API setrank_status setrank_rank(const setrank_candidates* candidates,
                                        setrank_oracle* oracle, const setrank_config* config,
                                        setrank_result** out);
SETRANK_API size_t setrank_result_size(const setrank_result* result);
SETRANK_API const char* setrank_result_doc_id(const setrank_result* result, size_t i);
/* Nonzero when the method produced scores (pointwise, allpair). */
SETRANK_API int setrank_result_has_scores(const setrank_result* result);
SETRANK_API double setrank_result_score(const setrank_result* result, size_t i);
SETRANK_API void setrank_result_ledger(const setrank_result* result, setrank_ledger* out);
SETRANK_API void setrank_result_destroy(setrank_result* result);

/* TREC run files. */
SETRANK_API setrank_status setrank_run_create(const char* tag, setrank_run** out);
SETRANK_API setrank_status setrank_run_read(const char* path, setrank_run** out);
SETRANK_API setrank_status setrank_run_write(const setrank_run* run, const char* path);
SETRANK_API setrank_status setrank_run_append(setrank_run* run, const char* query_id,
                                              const char* doc_id, double score);
SETRANK_API size_t setrank_run_num_queries(const setrank_run* run);
SETRANK_API const char* setrank_run_query_id(const setrank_run* run, size_t i);
SETRANK_API size_t setrank_run_num_entries(const setrank_run* run, const char* query_id);
SETRANK_API setrank_status setrank_run_entry(const setrank_run* run, const char* query_id,
                                             size_t i, const char** doc_id, double* score);
SETRANK_API void setrank_run_destroy(setrank_run* run);

SETRANK_API setrank_status setrank_qrels_read(const char* path, setrank_qrels** out);
SETRANK_API void setrank_qrels_destroy(setrank_qrels* qrels);

/* JSONL corpus keyed by doc id. */
SETRANK_API setrank_status setrank_corpus_read(const char* path, setrank_corpus** out);
/* SETRANK_E_NOT_FOUND when the id is absent. */
SETRANK_API setrank_status setrank_corpus_lookup(const setrank_corpus* corpus,
                                                 const char* doc_id, const char** text);
SETRANK_API size_t setrank_corpus_size(const setrank_corpus* corpus);
SETRANK_API void setrank_corpus_destroy(setrank_corpus* corpus);

/* query_id<TAB>text per line. */
SETRANK_API setrank_status setrank_queries_read(const char* path, setrank_queries** out);
SETRANK_API size_t setrank_queries_size(const setrank_queries* queries);
SETRANK_API const char* setrank_queries_id(const setrank_queries* queries, size_t i);
SETRANK_API const char* setrank_queries_text(const setrank_queries* queries, size_t i);
/* NULL when the id is unknown. */
SETRANK_API const char* setrank_queries_find(const setrank_queries* queries,
                                             const char* query_id);
SETRANK_API void setrank_queries_destroy(setrank_queries* queries);

/* NDCG@k. linear_gain = 0 uses 2^rel - 1. */
SETRANK_API setrank_status setrank_evaluate_ndcg(const setrank_run* run,
                                                 const setrank_qrels* qrels, int k,
                                                 int linear_gain, setrank_ndcg_report** out);
SETRANK_API size_t setrank_ndcg_size(const setrank_ndcg_report* report);
SETRANK_API const char* setrank_ndcg_query_id(const setrank_ndcg_report* report, size_t i);
SETRANK_API double setrank_ndcg_value(const setrank_ndcg_report* report, size_t i);
SETRANK_API int setrank_ndcg_flagged(const setrank_ndcg_report* report, size_t i);
SETRANK_API double setrank_ndcg_mean(const setrank_ndcg_report* report);
SETRANK_API size_t setrank_ndcg_overlapping(const setrank_ndcg_report* report);
SETRANK_API void setrank_ndcg_destroy(setrank_ndcg_report* report);

typedef struct setrank_sim_options {
  /* Comma-separated method names. */
  const char* methods;
  size_t n;
  int k;
  const int* c_list;
  size_t num_c;
  const double* noise;
  size_t num_noise;
  /* Comma-separated subset of asis,inverted,shuffled. */
  const char* inits;
  size_t seeds;
  uint64_t base_seed;
  int w;
  int s;
  int r;
  /* Std-dev of first-stage score noise; negative gives a uniform order. */
  double first_stage_noise;
  const char* scoring_mode;
} setrank_sim_options;

/* Receives one JSON object per record, without a trailing newline. */
typedef void (*setrank_record_callback)(const char* json_line, void* user);

SETRANK_API void setrank_sim_options_init(setrank_sim_options* options);
SETRANK_API setrank_status setrank_simulate(const setrank_sim_options* options,
                                            setrank_record_callback on_record, void* user,
                                            setrank_sim_report** out);
SETRANK_API size_t setrank_sim_num_summaries(const setrank_sim_report* report);
SETRANK_API const char* setrank_sim_summary_json(const setrank_sim_report* report, size_t i);
SETRANK_API void setrank_sim_destroy(setrank_sim_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SETRANK_SETRANK_H_ */
