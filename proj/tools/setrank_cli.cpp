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

// setrank: re-rank TREC runs with an LLM, evaluate runs, simulate ranking cost.
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "setrank/setrank.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Thrown for any failed C API call; carries the exit code to use.
struct Fatal : std::runtime_error {
  Fatal(const std::string& what, int code = kExitFailure)
      : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

void check(setrank_status status, const std::string& context = {}) {
  if (status == SETRANK_OK) return;
  std::string msg = context.empty() ? "" : context + ": ";
  msg += setrank_last_error();
  const bool usage = status == SETRANK_E_CONFIGURATION || status == SETRANK_E_INVALID_ARGUMENT;
  throw Fatal(msg, usage ? kExitUsage : kExitFailure);
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ConfigPtr = std::unique_ptr<setrank_config, Deleter<setrank_config, setrank_config_destroy>>;
using OraclePtr = std::unique_ptr<setrank_oracle, Deleter<setrank_oracle, setrank_oracle_destroy>>;
using CandidatesPtr =
    std::unique_ptr<setrank_candidates, Deleter<setrank_candidates, setrank_candidates_destroy>>;
using ResultPtr = std::unique_ptr<setrank_result, Deleter<setrank_result, setrank_result_destroy>>;
using RunPtr = std::unique_ptr<setrank_run, Deleter<setrank_run, setrank_run_destroy>>;
using QrelsPtr = std::unique_ptr<setrank_qrels, Deleter<setrank_qrels, setrank_qrels_destroy>>;
using CorpusPtr = std::unique_ptr<setrank_corpus, Deleter<setrank_corpus, setrank_corpus_destroy>>;
using QueriesPtr =
    std::unique_ptr<setrank_queries, Deleter<setrank_queries, setrank_queries_destroy>>;
using NdcgPtr =
    std::unique_ptr<setrank_ndcg_report, Deleter<setrank_ndcg_report, setrank_ndcg_destroy>>;
using SimPtr = std::unique_ptr<setrank_sim_report, Deleter<setrank_sim_report, setrank_sim_destroy>>;

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Appends whole lines with O_APPEND so concurrent writers never interleave
/// within a line.
class AppendFile {
 public:
  explicit AppendFile(const std::string& path)
      : fd_(::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644)) {
    if (fd_ < 0) throw Fatal("cannot open " + path + ": " + std::strerror(errno));
  }
  ~AppendFile() {
    if (fd_ >= 0) ::close(fd_);
  }
  AppendFile(const AppendFile&) = delete;
  AppendFile& operator=(const AppendFile&) = delete;

  void write_line(std::string line) {
    line.push_back('\n');
    const char* p = line.data();
    std::size_t left = line.size();
    while (left > 0) {
      const ssize_t n = ::write(fd_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Fatal(std::string("write failed: ") + std::strerror(errno));
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
  }

 private:
  int fd_;
};

// ---------------------------------------------------------------- rerank

struct RerankOptions {
  std::string method = "setwise.heapsort";
  int k = 10;
  int c = 3;
  int w = 4;
  int s = 2;
  int r = 5;
  int max_doc_tokens = 0;
  std::string scoring = "generation";
  std::string input;
  std::string corpus;
  std::string queries;
  std::string output;
  std::string endpoint;
  std::string model;
  std::string templates;
  std::string mock_scores;
  double noise = 0.0;
  double timeout = 60.0;
  int retries = 3;
  bool no_logprobs = false;
  bool no_completions = false;
  std::size_t parallel = 1;
  std::uint64_t seed = 0;
  std::string report;
  std::string tag = "setrank";
};

ConfigPtr make_config(const RerankOptions& o, int k) {
  setrank_config* raw = nullptr;
  check(setrank_config_create(&raw));
  ConfigPtr config(raw);
  check(setrank_config_set_method(config.get(), o.method.c_str()), "--method");
  check(setrank_config_set_int(config.get(), "k", k));
  check(setrank_config_set_int(config.get(), "c", o.c));
  check(setrank_config_set_int(config.get(), "w", o.w));
  check(setrank_config_set_int(config.get(), "s", o.s));
  check(setrank_config_set_int(config.get(), "r", o.r));
  if (o.max_doc_tokens > 0)
    check(setrank_config_set_int(config.get(), "max_doc_tokens", o.max_doc_tokens));
  check(setrank_config_set_scoring_mode(config.get(), o.scoring.c_str()), "--scoring");
  check(setrank_config_validate(config.get(), 0));
  return config;
}

/// qid -> doc id -> score. Three columns (qid docid score) or qrels (qid 0
/// docid grade).
std::unordered_map<std::string, std::unordered_map<std::string, double>> read_mock_scores(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Fatal("cannot open " + path);
  std::unordered_map<std::string, std::unordered_map<std::string, double>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string tok; fields >> tok;) f.push_back(tok);
    if (f.empty()) continue;
    if (f.size() != 3 && f.size() != 4)
      throw Fatal(path + ": line " + std::to_string(lineno) +
                  ": expected 'qid docid score' or 'qid 0 docid grade'");
    const std::string& doc = f.size() == 3 ? f[1] : f[2];
    try {
      std::size_t used = 0;
      const double value = std::stod(f.back(), &used);
      if (used != f.back().size() || !std::isfinite(value)) throw std::invalid_argument("");
      out[f[0]][doc] = value;
    } catch (const std::exception&) {
      throw Fatal(path + ": line " + std::to_string(lineno) + ": bad score '" + f.back() + "'");
    }
  }
  return out;
}

struct QueryJob {
  std::string qid;
  std::string text;
  std::vector<std::string> doc_ids;
  std::vector<std::string> texts;
  // Filled by the worker.
  std::vector<std::string> ranked;
  std::vector<double> scores;
  setrank_ledger ledger{};
  std::string error;
  int error_code = 0;
};

int cmd_rerank(const RerankOptions& o) {
  if (o.endpoint.empty() == o.mock_scores.empty())
    throw Fatal("exactly one of --endpoint or --mock-scores is required", kExitUsage);
  if (o.parallel < 1) throw Fatal("--parallel must be >= 1", kExitUsage);
  make_config(o, o.k);  // fail fast on bad flags

  setrank_run* run_raw = nullptr;
  check(setrank_run_read(o.input.c_str(), &run_raw), o.input);
  RunPtr input(run_raw);
  setrank_corpus* corpus_raw = nullptr;
  check(setrank_corpus_read(o.corpus.c_str(), &corpus_raw), o.corpus);
  CorpusPtr corpus(corpus_raw);
  setrank_queries* queries_raw = nullptr;
  check(setrank_queries_read(o.queries.c_str(), &queries_raw), o.queries);
  QueriesPtr queries(queries_raw);

  std::vector<QueryJob> jobs;
  for (std::size_t q = 0; q < setrank_run_num_queries(input.get()); ++q) {
    QueryJob job;
    job.qid = setrank_run_query_id(input.get(), q);
    const char* text = setrank_queries_find(queries.get(), job.qid.c_str());
    if (!text) throw Fatal("query " + job.qid + " is not in " + o.queries);
    job.text = text;
    const std::size_t n = setrank_run_num_entries(input.get(), job.qid.c_str());
    for (std::size_t i = 0; i < n; ++i) {
      const char* doc_id = nullptr;
      check(setrank_run_entry(input.get(), job.qid.c_str(), i, &doc_id, nullptr));
      const char* doc_text = nullptr;
      if (setrank_corpus_lookup(corpus.get(), doc_id, &doc_text) != SETRANK_OK)
        throw Fatal("doc id " + std::string(doc_id) + " (query " + job.qid +
                    ") is not in the corpus");
      job.doc_ids.emplace_back(doc_id);
      job.texts.emplace_back(doc_text);
    }
    jobs.push_back(std::move(job));
  }

  OraclePtr shared;
  std::unordered_map<std::string, std::unordered_map<std::string, double>> mock;
  if (!o.endpoint.empty()) {
    setrank_endpoint_options eo;
    setrank_endpoint_options_init(&eo);
    eo.base_url = o.endpoint.c_str();
    eo.model = o.model.c_str();
    eo.timeout_seconds = o.timeout;
    eo.max_retries = o.retries;
    eo.supports_logprobs = o.no_logprobs ? 0 : 1;
    eo.supports_completions = o.no_completions ? 0 : 1;
    eo.templates_dir = o.templates.empty() ? nullptr : o.templates.c_str();
    setrank_oracle* raw = nullptr;
    check(setrank_oracle_create_http(&eo, &raw), "--endpoint");
    shared.reset(raw);
  } else {
    mock = read_mock_scores(o.mock_scores);
  }

  auto process = [&](QueryJob& job, std::size_t index) {
    OraclePtr own;
    setrank_oracle* oracle = shared.get();
    if (!oracle) {
      const auto& scores = mock[job.qid];
      std::vector<const char*> ids;
      std::vector<double> values;
      for (const auto& id : job.doc_ids) {
        ids.push_back(id.c_str());
        const auto it = scores.find(id);
        values.push_back(it == scores.end() ? 0.0 : it->second);
      }
      setrank_oracle* raw = nullptr;
      check(setrank_oracle_create_mock(ids.data(), values.data(), ids.size(), o.noise,
                                       o.seed + index, &raw),
            "--mock-scores");
      own.reset(raw);
      oracle = own.get();
    }
    const int k = std::min<int>(o.k, static_cast<int>(job.doc_ids.size()));
    ConfigPtr config = make_config(o, k);
    setrank_candidates* cand_raw = nullptr;
    check(setrank_candidates_create(job.qid.c_str(), job.text.c_str(), &cand_raw));
    CandidatesPtr candidates(cand_raw);
    for (std::size_t i = 0; i < job.doc_ids.size(); ++i)
      check(setrank_candidates_add(candidates.get(), job.doc_ids[i].c_str(), job.texts[i].c_str()));
    setrank_result* result_raw = nullptr;
    check(setrank_rank(candidates.get(), oracle, config.get(), &result_raw),
          "query " + job.qid);
    ResultPtr result(result_raw);
    const bool scored = setrank_result_has_scores(result.get());
    for (std::size_t i = 0; i < setrank_result_size(result.get()); ++i) {
      job.ranked.emplace_back(setrank_result_doc_id(result.get(), i));
      job.scores.push_back(scored ? setrank_result_score(result.get(), i)
                                  : 1.0 / static_cast<double>(i + 1));
    }
    setrank_result_ledger(result.get(), &job.ledger);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      try {
        process(jobs[i], i);
      } catch (const Fatal& e) {
        jobs[i].error = e.what();
        jobs[i].error_code = e.exit_code;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t threads = std::min(o.parallel, std::max<std::size_t>(jobs.size(), 1));
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& job : jobs)
    if (!job.error.empty()) throw Fatal(job.error, job.error_code);

  setrank_run* out_raw = nullptr;
  check(setrank_run_create(o.tag.c_str(), &out_raw));
  RunPtr output(out_raw);
  for (auto& job : jobs) {
    // Failed pointwise scores come back as -inf; keep them last but finite.
    double floor = 0.0;
    bool any_finite = false;
    for (double s : job.scores)
      if (std::isfinite(s)) {
        floor = any_finite ? std::min(floor, s) : s;
        any_finite = true;
      }
    for (std::size_t i = 0; i < job.ranked.size(); ++i) {
      const double score = std::isfinite(job.scores[i]) ? job.scores[i] : floor - 1.0;
      check(setrank_run_append(output.get(), job.qid.c_str(), job.ranked[i].c_str(), score));
    }
  }
  check(setrank_run_write(output.get(), o.output.c_str()), o.output);

  std::ostringstream table;
  table << "query_id\tinferences\tprompt_tokens\tgenerated_tokens\tparse_failures\twall_seconds\n";
  setrank_ledger total{};
  for (const auto& job : jobs) {
    const auto& l = job.ledger;
    table << job.qid << '\t' << l.inferences << '\t' << l.prompt_tokens << '\t'
          << l.generated_tokens << '\t' << l.parse_failures << '\t' << fixed(l.wall_seconds, 3)
          << '\n';
    total.inferences += l.inferences;
    total.prompt_tokens += l.prompt_tokens;
    total.generated_tokens += l.generated_tokens;
    total.parse_failures += l.parse_failures;
    total.wall_seconds += l.wall_seconds;
  }
  const double n = jobs.empty() ? 1.0 : static_cast<double>(jobs.size());
  table << "mean\t" << fixed(total.inferences / n, 2) << '\t' << fixed(total.prompt_tokens / n, 2)
        << '\t' << fixed(total.generated_tokens / n, 2) << '\t'
        << fixed(total.parse_failures / n, 2) << '\t' << fixed(total.wall_seconds / n, 3) << '\n';
  std::cout << table.str();
  if (!o.report.empty()) {
    std::ofstream rep(o.report);
    if (!rep || !(rep << table.str())) throw Fatal("cannot write " + o.report);
  }
  return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string methods = "setwise.heapsort";
  std::size_t n = 100;
  int k = 10;
  std::string c_list = "3";
  std::string noise = "0";
  std::size_t seeds = 10;
  std::uint64_t seed = 0;
  std::string init = "asis";
  int w = 4;
  int s = 2;
  int r = 5;
  std::string first_stage_noise = "1";
  std::string scoring = "generation";
  std::string output;
};

template <typename T>
std::vector<T> parse_list(const std::string& flag, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_commas(text)) {
    std::istringstream in(item);
    T value{};
    if (!(in >> value) || !in.eof()) throw Fatal(flag + ": bad value '" + item + "'", kExitUsage);
    out.push_back(value);
  }
  if (out.empty()) throw Fatal(flag + ": empty list", kExitUsage);
  return out;
}

struct RecordSink {
  AppendFile* file = nullptr;
  std::string error;
};

void on_record(const char* line, void* user) {
  auto* sink = static_cast<RecordSink*>(user);
  if (!sink->error.empty()) return;
  try {
    if (sink->file) sink->file->write_line(line);
    else std::cout << line << '\n';
  } catch (const std::exception& e) {
    sink->error = e.what();
  }
}

int cmd_simulate(const SimulateOptions& o) {
  const auto cs = parse_list<int>("--c-list", o.c_list);
  const auto noise = parse_list<double>("--noise", o.noise);
  double first_stage = -1.0;
  if (o.first_stage_noise != "uniform")
    first_stage = parse_list<double>("--first-stage-noise", o.first_stage_noise).front();
  if (first_stage < 0.0 && o.first_stage_noise != "uniform")
    throw Fatal("--first-stage-noise must be >= 0 or 'uniform'", kExitUsage);

  setrank_sim_options so;
  setrank_sim_options_init(&so);
  so.methods = o.methods.c_str();
  so.n = o.n;
  so.k = o.k;
  so.c_list = cs.data();
  so.num_c = cs.size();
  so.noise = noise.data();
  so.num_noise = noise.size();
  so.inits = o.init.c_str();
  so.seeds = o.seeds;
  so.base_seed = o.seed;
  so.w = o.w;
  so.s = o.s;
  so.r = o.r;
  so.first_stage_noise = first_stage;
  so.scoring_mode = o.scoring.c_str();

  std::unique_ptr<AppendFile> file;
  if (!o.output.empty()) file = std::make_unique<AppendFile>(o.output);
  RecordSink sink{file.get(), {}};
  setrank_sim_report* raw = nullptr;
  check(setrank_simulate(&so, on_record, &sink, &raw));
  SimPtr report(raw);
  if (!sink.error.empty()) throw Fatal(sink.error);
  for (std::size_t i = 0; i < setrank_sim_num_summaries(report.get()); ++i)
    std::cout << setrank_sim_summary_json(report.get(), i) << '\n';
  return 0;
}

// -------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string run;
  std::string qrels;
  std::string metric = "ndcg@10";
  std::string gain = "exp";
  std::string output;
};

int cmd_evaluate(const EvaluateOptions& o) {
  int k = 0;
  if (o.metric.rfind("ndcg@", 0) != 0 ||
      std::sscanf(o.metric.c_str() + 5, "%d", &k) != 1 || k < 1 ||
      std::to_string(k) != o.metric.substr(5))
    throw Fatal("--metric must look like ndcg@K with K >= 1", kExitUsage);
  if (o.gain != "exp" && o.gain != "linear")
    throw Fatal("--gain must be exp or linear", kExitUsage);

  setrank_run* run_raw = nullptr;
  check(setrank_run_read(o.run.c_str(), &run_raw), o.run);
  RunPtr run(run_raw);
  setrank_qrels* qrels_raw = nullptr;
  check(setrank_qrels_read(o.qrels.c_str(), &qrels_raw), o.qrels);
  QrelsPtr qrels(qrels_raw);
  setrank_ndcg_report* rep_raw = nullptr;
  check(setrank_evaluate_ndcg(run.get(), qrels.get(), k, o.gain == "linear", &rep_raw));
  NdcgPtr report(rep_raw);
  if (setrank_ndcg_overlapping(report.get()) == 0) throw Fatal("no overlapping queries");

  std::ostringstream table;
  table << "query_id\t" << o.metric << "\tflagged\n";
  for (std::size_t i = 0; i < setrank_ndcg_size(report.get()); ++i)
    table << setrank_ndcg_query_id(report.get(), i) << '\t'
          << fixed(setrank_ndcg_value(report.get(), i), 4) << '\t'
          << setrank_ndcg_flagged(report.get(), i) << '\n';
  table << "mean\t" << fixed(setrank_ndcg_mean(report.get()), 4) << "\t0\n";
  std::cout << table.str();
  if (!o.output.empty()) {
    std::ofstream out(o.output);
    if (!out || !(out << table.str())) throw Fatal("cannot write " + o.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"setrank: zero-shot LLM re-ranking with setwise prompting"};
  app.set_version_flag("--version", std::string(setrank_version()));
  app.require_subcommand(1);

  RerankOptions ro;
  auto* rerank = app.add_subcommand("rerank", "Re-rank a TREC run with an LLM or mock oracle");
  rerank->add_option("--method", ro.method, "Ranking method, e.g. setwise.heapsort")
      ->capture_default_str();
  rerank->add_option("--k", ro.k, "Top-k to produce")->capture_default_str();
  rerank->add_option("--c", ro.c, "Documents per setwise comparison")->capture_default_str();
  rerank->add_option("--w", ro.w, "Listwise window size")->capture_default_str();
  rerank->add_option("--s", ro.s, "Listwise step")->capture_default_str();
  rerank->add_option("--r", ro.r, "Listwise repetitions")->capture_default_str();
  rerank->add_option("--max-doc-tokens", ro.max_doc_tokens,
                     "Per-document truncation (0 = method default)");
  rerank->add_option("--scoring", ro.scoring, "generation or logits")->capture_default_str();
  rerank->add_option("--input", ro.input, "First-stage TREC run")->required();
  rerank->add_option("--corpus", ro.corpus, "JSONL corpus with doc_id and text")->required();
  rerank->add_option("--queries", ro.queries, "TSV of query_id and text")->required();
  rerank->add_option("--output", ro.output, "Output TREC run")->required();
  rerank->add_option("--endpoint", ro.endpoint, "OpenAI-compatible base URL");
  rerank->add_option("--model", ro.model, "Model name sent to the endpoint");
  rerank->add_option("--templates", ro.templates, "Directory of replacement prompt templates");
  rerank->add_option("--mock-scores", ro.mock_scores,
                     "Ground-truth scores ('qid docid score' or qrels) for a mock oracle");
  rerank->add_option("--noise", ro.noise, "Mock oracle error probability")->capture_default_str();
  rerank->add_option("--timeout", ro.timeout, "Request timeout in seconds")->capture_default_str();
  rerank->add_option("--retries", ro.retries, "Retries per request")->capture_default_str();
  rerank->add_flag("--no-logprobs", ro.no_logprobs, "Endpoint cannot return logprobs");
  rerank->add_flag("--no-completions", ro.no_completions, "Endpoint has no /v1/completions");
  rerank->add_option("--parallel", ro.parallel, "Queries ranked concurrently")
      ->capture_default_str();
  rerank->add_option("--seed", ro.seed, "Seed for the mock oracle")->capture_default_str();
  rerank->add_option("--report", ro.report, "Write the cost ledger table here");
  rerank->add_option("--tag", ro.tag, "Run tag")->capture_default_str();

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Mock-oracle cost and robustness sweeps");
  simulate->add_option("--methods", so.methods, "Comma-separated methods")->capture_default_str();
  simulate->add_option("--n", so.n, "Documents per instance")->capture_default_str();
  simulate->add_option("--k", so.k, "Top-k")->capture_default_str();
  simulate->add_option("--c-list", so.c_list, "Comma-separated set sizes")->capture_default_str();
  simulate->add_option("--noise", so.noise, "Comma-separated oracle error probabilities")
      ->capture_default_str();
  simulate->add_option("--seeds", so.seeds, "Instances per configuration")->capture_default_str();
  simulate->add_option("--seed", so.seed, "First instance seed")->capture_default_str();
  simulate->add_option("--init", so.init, "Comma-separated subset of asis,inverted,shuffled")
      ->capture_default_str();
  simulate->add_option("--w", so.w, "Listwise window size")->capture_default_str();
  simulate->add_option("--s", so.s, "Listwise step")->capture_default_str();
  simulate->add_option("--r", so.r, "Listwise repetitions")->capture_default_str();
  simulate->add_option("--first-stage-noise", so.first_stage_noise,
                       "First-stage score noise std-dev, or 'uniform'")
      ->capture_default_str();
  simulate->add_option("--scoring", so.scoring, "generation or logits")->capture_default_str();
  simulate->add_option("--output", so.output, "Append records to this JSONL file");

  EvaluateOptions eo;
  auto* evaluate = app.add_subcommand("evaluate", "NDCG of a TREC run against qrels");
  evaluate->add_option("--run", eo.run, "TREC run")->required();
  evaluate->add_option("--qrels", eo.qrels, "TREC qrels")->required();
  evaluate->add_option("--metric", eo.metric, "ndcg@K")->capture_default_str();
  evaluate->add_option("--gain", eo.gain, "exp (2^rel - 1) or linear")->capture_default_str();
  evaluate->add_option("--output", eo.output, "Write the per-query table as TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*rerank) {
      if (ro.k < 1) throw Fatal("--k must be >= 1", kExitUsage);
      return cmd_rerank(ro);
    }
    if (*simulate) {
      if (so.k < 1) throw Fatal("--k must be >= 1", kExitUsage);
      return cmd_simulate(so);
    }
    if (*evaluate) return cmd_evaluate(eo);
  } catch (const Fatal& e) {
    std::cerr << "setrank: " << e.what() << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "setrank: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
