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

#include "setrank/setrank.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "setrank/core.hpp"
#include "setrank/eval.hpp"
#include "setrank/llm_client.hpp"
#include "setrank/oracle.hpp"
#include "setrank/rankers.hpp"
#include "setrank/simulate.hpp"

using namespace setrank;

struct setrank_config {
  RankerConfig config;
};

struct setrank_oracle {
  std::optional<PromptTemplates> templates;
  std::unique_ptr<Oracle> oracle;
};

struct setrank_candidates {
  Query query;
  std::vector<Document> docs;
};

struct setrank_result {
  RankResult result;
};

struct setrank_run {
  RunFile run;
};

struct setrank_qrels {
  Qrels qrels;
};

struct setrank_corpus {
  std::unordered_map<std::string, Document> docs;
};

struct setrank_queries {
  std::vector<Query> queries;
};

struct setrank_ndcg_report {
  NdcgReport report;
};

struct setrank_sim_report {
  std::vector<std::string> summaries;
};

namespace {

thread_local std::string g_last_error;

setrank_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return SETRANK_E_INVALID_ARGUMENT;
    case ErrorCode::kConfiguration: return SETRANK_E_CONFIGURATION;
    case ErrorCode::kCapabilityUnsupported: return SETRANK_E_CAPABILITY_UNSUPPORTED;
    case ErrorCode::kLabelOverflow: return SETRANK_E_LABEL_OVERFLOW;
    case ErrorCode::kArityMismatch: return SETRANK_E_ARITY_MISMATCH;
    case ErrorCode::kParse: return SETRANK_E_PARSE;
    case ErrorCode::kIo: return SETRANK_E_IO;
    case ErrorCode::kTransport: return SETRANK_E_TRANSPORT;
  }
  return SETRANK_E_INTERNAL;
}

setrank_status fail(setrank_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
setrank_status guarded(F&& body) {
  try {
    body();
    return SETRANK_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SETRANK_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SETRANK_E_INTERNAL, e.what());
  } catch (...) {
    return fail(SETRANK_E_INTERNAL, "unknown exception");
  }
}

#define SETRANK_REQUIRE(cond, what) \
  if (!(cond)) return fail(SETRANK_E_INVALID_ARGUMENT, what)

std::vector<std::string> split_list(const char* text) {
  std::vector<std::string> out;
  std::stringstream ss(text ? text : "");
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ScoringMode parse_mode(const std::string& mode) {
  if (mode == "generation") return ScoringMode::kGeneration;
  if (mode == "logits") return ScoringMode::kLogits;
  throw ConfigurationError("unknown scoring mode '" + mode +
                           "' (expected generation or logits)");
}

}  // namespace

extern "C" {

const char* setrank_version(void) { return "1.0.0"; }

const char* setrank_last_error(void) { return g_last_error.c_str(); }

const char* setrank_status_name(setrank_status status) {
  switch (status) {
    case SETRANK_OK: return "ok";
    case SETRANK_E_INVALID_ARGUMENT: return "invalid argument";
    case SETRANK_E_CONFIGURATION: return "configuration error";
    case SETRANK_E_CAPABILITY_UNSUPPORTED: return "capability unsupported";
    case SETRANK_E_LABEL_OVERFLOW: return "label overflow";
    case SETRANK_E_ARITY_MISMATCH: return "arity mismatch";
    case SETRANK_E_PARSE: return "parse error";
    case SETRANK_E_IO: return "i/o error";
    case SETRANK_E_TRANSPORT: return "transport error";
    case SETRANK_E_NOT_FOUND: return "not found";
    case SETRANK_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

setrank_status setrank_config_create(setrank_config** out) {
  SETRANK_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new setrank_config{}; });
}

void setrank_config_destroy(setrank_config* config) { delete config; }

setrank_status setrank_config_set_method(setrank_config* config, const char* name) {
  SETRANK_REQUIRE(config && name, "config and name are required");
  return guarded([&] { config->config.method = parse_method(name); });
}

setrank_status setrank_config_set_int(setrank_config* config, const char* key,
                                      int64_t value) {
  SETRANK_REQUIRE(config && key, "config and key are required");
  const std::string k = key;
  if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
    return fail(SETRANK_E_CONFIGURATION, k + " is out of range");
  const int v = static_cast<int>(value);
  RankerConfig& c = config->config;
  if (k == "k") c.k = v;
  else if (k == "c") c.c = v;
  else if (k == "w") c.w = v;
  else if (k == "s") c.s = v;
  else if (k == "r") c.r = v;
  else if (k == "max_doc_tokens") c.max_doc_tokens = v;
  else return fail(SETRANK_E_INVALID_ARGUMENT, "unknown config key '" + k + "'");
  return SETRANK_OK;
}

setrank_status setrank_config_set_scoring_mode(setrank_config* config, const char* mode) {
  SETRANK_REQUIRE(config && mode, "config and mode are required");
  return guarded([&] { config->config.scoring_mode = parse_mode(mode); });
}

setrank_status setrank_config_validate(const setrank_config* config, size_t n) {
  SETRANK_REQUIRE(config, "config is NULL");
  return guarded([&] {
    if (n == 0) config->config.validate();
    else config->config.validate_for(n);
  });
}

setrank_status setrank_max_inferences(const setrank_config* config, size_t n,
                                      uint64_t* out) {
  SETRANK_REQUIRE(config && out, "config and out are required");
  return guarded([&] { *out = max_inferences(config->config, n); });
}

setrank_status setrank_oracle_create_mock(const char* const* doc_ids, const double* scores,
                                          size_t n, double noise_p, uint64_t seed,
                                          setrank_oracle** out) {
  SETRANK_REQUIRE(out, "out is NULL");
  SETRANK_REQUIRE(n == 0 || (doc_ids && scores), "doc_ids and scores are required");
  SETRANK_REQUIRE(noise_p >= 0.0 && noise_p <= 1.0, "noise_p must lie in [0, 1]");
  return guarded([&] {
    MockOracleSpec spec;
    for (size_t i = 0; i < n; ++i) {
      if (!doc_ids[i]) throw Error(ErrorCode::kInvalidArgument, "NULL doc id");
      if (!std::isfinite(scores[i]))
        throw Error(ErrorCode::kInvalidArgument,
                    std::string("non-finite score for ") + doc_ids[i]);
      spec.true_score[doc_ids[i]] = scores[i];
    }
    spec.noise_p = noise_p;
    spec.rng_seed = seed;
    auto handle = std::make_unique<setrank_oracle>();
    handle->oracle = std::make_unique<MockOracle>(std::move(spec));
    *out = handle.release();
  });
}

void setrank_endpoint_options_init(setrank_endpoint_options* options) {
  if (!options) return;
  const EndpointConfig defaults;
  *options = setrank_endpoint_options{};
  options->timeout_seconds = std::chrono::duration<double>(defaults.timeout).count();
  options->max_retries = defaults.max_retries;
  options->supports_logprobs = defaults.supports_logprobs ? 1 : 0;
  options->supports_completions = defaults.supports_completions ? 1 : 0;
  options->max_parallel = defaults.max_parallel;
}

setrank_status setrank_oracle_create_http(const setrank_endpoint_options* options,
                                          setrank_oracle** out) {
  SETRANK_REQUIRE(options && out, "options and out are required");
  SETRANK_REQUIRE(options->base_url, "base_url is required");
  return guarded([&] {
    EndpointConfig cfg;
    cfg.base_url = options->base_url;
    if (options->model) cfg.model = options->model;
    cfg.api_key = options->api_key ? options->api_key : EndpointConfig::api_key_from_env();
    if (options->timeout_seconds > 0)
      cfg.timeout = std::chrono::milliseconds(
          static_cast<std::int64_t>(std::llround(options->timeout_seconds * 1000.0)));
    cfg.max_retries = options->max_retries;
    cfg.supports_logprobs = options->supports_logprobs != 0;
    cfg.supports_completions = options->supports_completions != 0;
    if (options->max_parallel > 0) cfg.max_parallel = options->max_parallel;
    auto handle = std::make_unique<setrank_oracle>();
    if (options->templates_dir) handle->templates = PromptTemplates::load(options->templates_dir);
    const PromptTemplates& templates =
        handle->templates ? *handle->templates : PromptTemplates::builtin();
    handle->oracle = std::make_unique<LlmOracle>(std::move(cfg), default_tokenizer(), templates);
    *out = handle.release();
  });
}

void setrank_oracle_destroy(setrank_oracle* oracle) { delete oracle; }

setrank_status setrank_candidates_create(const char* query_id, const char* query_text,
                                         setrank_candidates** out) {
  SETRANK_REQUIRE(query_id && query_text && out, "query_id, query_text and out are required");
  return guarded([&] { *out = new setrank_candidates{Query{query_id, query_text}, {}}; });
}

setrank_status setrank_candidates_add(setrank_candidates* candidates, const char* doc_id,
                                      const char* text) {
  SETRANK_REQUIRE(candidates && doc_id && text, "candidates, doc_id and text are required");
  return guarded([&] {
    for (const auto& d : candidates->docs)
      if (d.doc_id == doc_id)
        throw Error(ErrorCode::kInvalidArgument, std::string("duplicate doc id ") + doc_id);
    candidates->docs.push_back(Document{doc_id, text});
  });
}

size_t setrank_candidates_size(const setrank_candidates* candidates) {
  return candidates ? candidates->docs.size() : 0;
}

void setrank_candidates_destroy(setrank_candidates* candidates) { delete candidates; }

setrank_status setrank_rank(const setrank_candidates* candidates, setrank_oracle* oracle,
                            const setrank_config* config, setrank_result** out) {
  SETRANK_REQUIRE(candidates && oracle && config && out, "all arguments are required");
  return guarded([&] {
    const CandidateList list(candidates->query, candidates->docs);
    auto handle = std::make_unique<setrank_result>();
    handle->result = rank(list, *oracle->oracle, config->config);
    *out = handle.release();
  });
}

size_t setrank_result_size(const setrank_result* result) {
  return result ? result->result.doc_ids.size() : 0;
}

const char* setrank_result_doc_id(const setrank_result* result, size_t i) {
  if (!result || i >= result->result.doc_ids.size()) return nullptr;
  return result->result.doc_ids[i].c_str();
}

int setrank_result_has_scores(const setrank_result* result) {
  return result && !result->result.scores.empty() ? 1 : 0;
}

double setrank_result_score(const setrank_result* result, size_t i) {
  if (!result || i >= result->result.scores.size()) return 0.0;
  return result->result.scores[i];
}

void setrank_result_ledger(const setrank_result* result, setrank_ledger* out) {
  if (!out) return;
  *out = setrank_ledger{};
  if (!result) return;
  const CostCounts& c = result->result.cost;
  out->inferences = c.num_inferences;
  out->prompt_tokens = c.prompt_tokens;
  out->generated_tokens = c.generated_tokens;
  out->parse_failures = c.parse_failures;
  out->wall_seconds = c.wall_seconds();
}

void setrank_result_destroy(setrank_result* result) { delete result; }

setrank_status setrank_run_create(const char* tag, setrank_run** out) {
  SETRANK_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new setrank_run{RunFile(tag ? tag : "setrank")}; });
}

setrank_status setrank_run_read(const char* path, setrank_run** out) {
  SETRANK_REQUIRE(path && out, "path and out are required");
  return guarded([&] { *out = new setrank_run{read_run(std::filesystem::path(path))}; });
}

setrank_status setrank_run_write(const setrank_run* run, const char* path) {
  SETRANK_REQUIRE(run && path, "run and path are required");
  return guarded([&] { write_run(std::filesystem::path(path), run->run); });
}

setrank_status setrank_run_append(setrank_run* run, const char* query_id,
                                  const char* doc_id, double score) {
  SETRANK_REQUIRE(run && query_id && doc_id, "run, query_id and doc_id are required");
  return guarded([&] { run->run.append(query_id, doc_id, score); });
}

size_t setrank_run_num_queries(const setrank_run* run) {
  return run ? run->run.query_ids().size() : 0;
}

const char* setrank_run_query_id(const setrank_run* run, size_t i) {
  if (!run || i >= run->run.query_ids().size()) return nullptr;
  return run->run.query_ids()[i].c_str();
}

size_t setrank_run_num_entries(const setrank_run* run, const char* query_id) {
  if (!run || !query_id) return 0;
  return run->run.entries(query_id).size();
}

setrank_status setrank_run_entry(const setrank_run* run, const char* query_id, size_t i,
                                 const char** doc_id, double* score) {
  SETRANK_REQUIRE(run && query_id, "run and query_id are required");
  const auto& entries = run->run.entries(query_id);
  if (i >= entries.size())
    return fail(SETRANK_E_NOT_FOUND, "no entry " + std::to_string(i) + " for query " + query_id);
  if (doc_id) *doc_id = entries[i].doc_id.c_str();
  if (score) *score = entries[i].score;
  return SETRANK_OK;
}

void setrank_run_destroy(setrank_run* run) { delete run; }

setrank_status setrank_qrels_read(const char* path, setrank_qrels** out) {
  SETRANK_REQUIRE(path && out, "path and out are required");
  return guarded([&] { *out = new setrank_qrels{read_qrels(std::filesystem::path(path))}; });
}

void setrank_qrels_destroy(setrank_qrels* qrels) { delete qrels; }

setrank_status setrank_corpus_read(const char* path, setrank_corpus** out) {
  SETRANK_REQUIRE(path && out, "path and out are required");
  return guarded([&] { *out = new setrank_corpus{read_corpus(std::filesystem::path(path))}; });
}

setrank_status setrank_corpus_lookup(const setrank_corpus* corpus, const char* doc_id,
                                     const char** text) {
  SETRANK_REQUIRE(corpus && doc_id && text, "corpus, doc_id and text are required");
  const auto it = corpus->docs.find(doc_id);
  if (it == corpus->docs.end())
    return fail(SETRANK_E_NOT_FOUND, std::string("doc id not in corpus: ") + doc_id);
  *text = it->second.text.c_str();
  return SETRANK_OK;
}

size_t setrank_corpus_size(const setrank_corpus* corpus) {
  return corpus ? corpus->docs.size() : 0;
}

void setrank_corpus_destroy(setrank_corpus* corpus) { delete corpus; }

setrank_status setrank_queries_read(const char* path, setrank_queries** out) {
  SETRANK_REQUIRE(path && out, "path and out are required");
  return guarded([&] { *out = new setrank_queries{read_queries(std::filesystem::path(path))}; });
}

size_t setrank_queries_size(const setrank_queries* queries) {
  return queries ? queries->queries.size() : 0;
}

const char* setrank_queries_id(const setrank_queries* queries, size_t i) {
  if (!queries || i >= queries->queries.size()) return nullptr;
  return queries->queries[i].query_id.c_str();
}

const char* setrank_queries_text(const setrank_queries* queries, size_t i) {
  if (!queries || i >= queries->queries.size()) return nullptr;
  return queries->queries[i].text.c_str();
}

const char* setrank_queries_find(const setrank_queries* queries, const char* query_id) {
  if (!queries || !query_id) return nullptr;
  for (const auto& q : queries->queries)
    if (q.query_id == query_id) return q.text.c_str();
  return nullptr;
}

void setrank_queries_destroy(setrank_queries* queries) { delete queries; }

setrank_status setrank_evaluate_ndcg(const setrank_run* run, const setrank_qrels* qrels,
                                     int k, int linear_gain, setrank_ndcg_report** out) {
  SETRANK_REQUIRE(run && qrels && out, "run, qrels and out are required");
  return guarded([&] {
    *out = new setrank_ndcg_report{
        ndcg_at_k(run->run, qrels->qrels, k, linear_gain ? Gain::kLinear : Gain::kExponential)};
  });
}

size_t setrank_ndcg_size(const setrank_ndcg_report* report) {
  return report ? report->report.per_query.size() : 0;
}

const char* setrank_ndcg_query_id(const setrank_ndcg_report* report, size_t i) {
  if (!report || i >= report->report.per_query.size()) return nullptr;
  return report->report.per_query[i].query_id.c_str();
}

double setrank_ndcg_value(const setrank_ndcg_report* report, size_t i) {
  if (!report || i >= report->report.per_query.size()) return 0.0;
  return report->report.per_query[i].ndcg;
}

int setrank_ndcg_flagged(const setrank_ndcg_report* report, size_t i) {
  if (!report || i >= report->report.per_query.size()) return 0;
  return report->report.per_query[i].flagged ? 1 : 0;
}

double setrank_ndcg_mean(const setrank_ndcg_report* report) {
  return report ? report->report.mean : 0.0;
}

size_t setrank_ndcg_overlapping(const setrank_ndcg_report* report) {
  return report ? report->report.overlapping : 0;
}

void setrank_ndcg_destroy(setrank_ndcg_report* report) { delete report; }

void setrank_sim_options_init(setrank_sim_options* options) {
  if (!options) return;
  const SimulationConfig defaults;
  *options = setrank_sim_options{};
  options->methods = "setwise.heapsort";
  options->n = defaults.n;
  options->k = defaults.k;
  options->inits = "asis";
  options->seeds = defaults.seeds;
  options->base_seed = defaults.base_seed;
  options->w = defaults.w;
  options->s = defaults.s;
  options->r = defaults.r;
  options->first_stage_noise = defaults.first_stage_noise;
  options->scoring_mode = "generation";
}

setrank_status setrank_simulate(const setrank_sim_options* options,
                                setrank_record_callback on_record, void* user,
                                setrank_sim_report** out) {
  SETRANK_REQUIRE(options && out, "options and out are required");
  return guarded([&] {
    SimulationConfig cfg;
    cfg.methods.clear();
    for (const auto& name : split_list(options->methods)) cfg.methods.push_back(parse_method(name));
    if (cfg.methods.empty()) throw ConfigurationError("no methods given");
    cfg.n = options->n;
    cfg.k = options->k;
    if (options->num_c > 0) {
      if (!options->c_list) throw Error(ErrorCode::kInvalidArgument, "c_list is NULL");
      cfg.c_list.assign(options->c_list, options->c_list + options->num_c);
    }
    if (options->num_noise > 0) {
      if (!options->noise) throw Error(ErrorCode::kInvalidArgument, "noise is NULL");
      cfg.noise.assign(options->noise, options->noise + options->num_noise);
    }
    cfg.inits.clear();
    for (const auto& name : split_list(options->inits)) cfg.inits.push_back(parse_provenance(name));
    if (cfg.inits.empty()) throw ConfigurationError("no initial orderings given");
    cfg.seeds = options->seeds;
    cfg.base_seed = options->base_seed;
    cfg.w = options->w;
    cfg.s = options->s;
    cfg.r = options->r;
    cfg.first_stage_noise = options->first_stage_noise < 0
                                ? std::numeric_limits<double>::infinity()
                                : options->first_stage_noise;
    if (options->scoring_mode) cfg.scoring_mode = parse_mode(options->scoring_mode);

    const auto records = simulate(cfg, [&](const SimulationRecord& r) {
      if (on_record) on_record(to_json_line(r).c_str(), user);
    });
    auto handle = std::make_unique<setrank_sim_report>();
    for (const auto& s : summarize(records)) handle->summaries.push_back(to_json_line(s));
    *out = handle.release();
  });
}

size_t setrank_sim_num_summaries(const setrank_sim_report* report) {
  return report ? report->summaries.size() : 0;
}

const char* setrank_sim_summary_json(const setrank_sim_report* report, size_t i) {
  if (!report || i >= report->summaries.size()) return nullptr;
  return report->summaries[i].c_str();
}

void setrank_sim_destroy(setrank_sim_report* report) { delete report; }

}  // extern "C"
