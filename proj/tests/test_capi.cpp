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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "setrank/setrank.h"

namespace {

const std::string kData = SETRANK_TEST_DATA;

std::string data(const char* name) { return kData + "/" + name; }

struct Mock {
  std::vector<std::string> ids;
  std::vector<double> scores;
  setrank_oracle* oracle = nullptr;

  explicit Mock(int n, double noise = 0.0) {
    for (int i = 0; i < n; ++i) {
      ids.push_back("d" + std::to_string(i));
      scores.push_back(static_cast<double>((i * 37) % n));
    }
    std::vector<const char*> ptrs;
    for (const auto& id : ids) ptrs.push_back(id.c_str());
    REQUIRE(setrank_oracle_create_mock(ptrs.data(), scores.data(), ids.size(), noise, 1,
                                       &oracle) == SETRANK_OK);
  }
  ~Mock() { setrank_oracle_destroy(oracle); }

  setrank_candidates* candidates() const {
    setrank_candidates* c = nullptr;
    REQUIRE(setrank_candidates_create("q", "query text", &c) == SETRANK_OK);
    for (const auto& id : ids)
      REQUIRE(setrank_candidates_add(c, id.c_str(), ("passage " + id).c_str()) == SETRANK_OK);
    return c;
  }

  std::string best() const {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i] > scores[arg]) arg = i;
    return ids[arg];
  }
};

setrank_config* config(const char* method, int k) {
  setrank_config* c = nullptr;
  REQUIRE(setrank_config_create(&c) == SETRANK_OK);
  REQUIRE(setrank_config_set_method(c, method) == SETRANK_OK);
  REQUIRE(setrank_config_set_int(c, "k", k) == SETRANK_OK);
  return c;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(setrank_version()) == "1.0.0");
  CHECK(std::string(setrank_status_name(SETRANK_OK)) == "ok");
  CHECK(std::string(setrank_status_name(SETRANK_E_NOT_FOUND)) == "not found");
}

TEST_CASE("configuration errors carry a message") {
  setrank_config* c = nullptr;
  REQUIRE(setrank_config_create(&c) == SETRANK_OK);
  CHECK(setrank_config_set_method(c, "setwise.quicksort") == SETRANK_E_CONFIGURATION);
  CHECK(std::string(setrank_last_error()).find("setwise.quicksort") != std::string::npos);
  CHECK(setrank_config_set_int(c, "z", 1) == SETRANK_E_INVALID_ARGUMENT);
  CHECK(setrank_config_set_scoring_mode(c, "beam") == SETRANK_E_CONFIGURATION);
  CHECK(setrank_config_set_int(c, "k", 0) == SETRANK_OK);
  CHECK(setrank_config_validate(c, 0) == SETRANK_E_CONFIGURATION);
  CHECK(setrank_config_set_int(c, "k", 10) == SETRANK_OK);
  CHECK(setrank_config_validate(c, 5) == SETRANK_E_CONFIGURATION);
  CHECK(setrank_config_validate(c, 50) == SETRANK_OK);
  CHECK(setrank_config_create(nullptr) == SETRANK_E_INVALID_ARGUMENT);
  setrank_config_destroy(c);
  setrank_config_destroy(nullptr);
}

TEST_CASE("worst-case call counts") {
  uint64_t calls = 0;
  setrank_config* c = config("listwise.generation", 10);
  REQUIRE(setrank_max_inferences(c, 100, &calls) == SETRANK_OK);
  CHECK(calls == 245);
  REQUIRE(setrank_config_set_method(c, "pairwise.allpair") == SETRANK_OK);
  REQUIRE(setrank_max_inferences(c, 100, &calls) == SETRANK_OK);
  CHECK(calls == 9900);
  setrank_config_destroy(c);
}

TEST_CASE("rank with the mock oracle") {
  Mock mock(40);
  setrank_candidates* cands = mock.candidates();
  CHECK(setrank_candidates_size(cands) == 40);
  CHECK(setrank_candidates_add(cands, "d0", "dup") == SETRANK_E_INVALID_ARGUMENT);

  for (const char* method : {"setwise.heapsort", "setwise.bubblesort", "pairwise.heapsort",
                             "listwise.generate", "pointwise.yes_no", "pairwise.allpair"}) {
    CAPTURE(method);
    setrank_config* c = config(method, 5);
    setrank_result* result = nullptr;
    REQUIRE(setrank_rank(cands, mock.oracle, c, &result) == SETRANK_OK);
    CHECK(setrank_result_size(result) == 40);
    CHECK(std::string(setrank_result_doc_id(result, 0)) == mock.best());
    CHECK(setrank_result_doc_id(result, 40) == nullptr);
    setrank_ledger ledger{};
    setrank_result_ledger(result, &ledger);
    uint64_t bound = 0;
    REQUIRE(setrank_max_inferences(c, 40, &bound) == SETRANK_OK);
    CHECK(ledger.inferences > 0);
    CHECK(ledger.inferences <= bound);
    CHECK(ledger.prompt_tokens > 0);
    CHECK(ledger.parse_failures == 0);
    const bool scored = std::string(method) == "pointwise.yes_no" ||
                        std::string(method) == "pairwise.allpair";
    CHECK((setrank_result_has_scores(result) != 0) == scored);
    if (scored) CHECK(setrank_result_score(result, 0) >= setrank_result_score(result, 1));
    setrank_result_destroy(result);
    setrank_config_destroy(c);
  }
  setrank_candidates_destroy(cands);
}

TEST_CASE("rank reports capability and size errors") {
  Mock mock(6);
  setrank_candidates* cands = mock.candidates();
  setrank_config* c = config("setwise.heapsort", 10);
  setrank_result* result = nullptr;
  CHECK(setrank_rank(cands, mock.oracle, c, &result) == SETRANK_E_CONFIGURATION);
  CHECK(result == nullptr);
  REQUIRE(setrank_config_set_int(c, "k", 2) == SETRANK_OK);
  REQUIRE(setrank_config_set_int(c, "c", 30) == SETRANK_OK);
  CHECK(setrank_rank(cands, mock.oracle, c, &result) != SETRANK_OK);
  setrank_config_destroy(c);
  setrank_candidates_destroy(cands);
}

TEST_CASE("concurrent ranking shares one oracle") {
  Mock mock(30);
  setrank_config* c = config("setwise.heapsort", 3);
  std::vector<std::thread> threads;
  std::vector<std::string> tops(8);
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      setrank_candidates* cands = mock.candidates();
      setrank_result* r = nullptr;
      if (setrank_rank(cands, mock.oracle, c, &r) == SETRANK_OK)
        tops[t] = setrank_result_doc_id(r, 0);
      setrank_result_destroy(r);
      setrank_candidates_destroy(cands);
    });
  for (auto& th : threads) th.join();
  for (const auto& top : tops) CHECK(top == mock.best());
  setrank_config_destroy(c);
}

TEST_CASE("run files") {
  setrank_run* run = nullptr;
  REQUIRE(setrank_run_read(data("run.trec").c_str(), &run) == SETRANK_OK);
  REQUIRE(setrank_run_num_queries(run) == 2);
  CHECK(std::string(setrank_run_query_id(run, 0)) == "q1");
  CHECK(setrank_run_num_entries(run, "q1") == 8);
  CHECK(setrank_run_num_entries(run, "q2") == 6);
  CHECK(setrank_run_num_entries(run, "nope") == 0);
  const char* doc = nullptr;
  double score = 0;
  REQUIRE(setrank_run_entry(run, "q1", 0, &doc, &score) == SETRANK_OK);
  CHECK(std::string(doc) == "q1d0");
  CHECK(score == doctest::Approx(10.0));
  CHECK(setrank_run_entry(run, "q1", 8, &doc, &score) == SETRANK_E_NOT_FOUND);

  const auto path = std::filesystem::temp_directory_path() / "setrank_capi_run.trec";
  setrank_run* out = nullptr;
  REQUIRE(setrank_run_create("mine", &out) == SETRANK_OK);
  REQUIRE(setrank_run_append(out, "a", "x", 2.0) == SETRANK_OK);
  REQUIRE(setrank_run_append(out, "a", "y", 1.0) == SETRANK_OK);
  REQUIRE(setrank_run_write(out, path.c_str()) == SETRANK_OK);
  setrank_run* back = nullptr;
  REQUIRE(setrank_run_read(path.c_str(), &back) == SETRANK_OK);
  CHECK(setrank_run_num_entries(back, "a") == 2);
  std::filesystem::remove(path);

  CHECK(setrank_run_read(data("missing.trec").c_str(), &back) == SETRANK_E_IO);
  setrank_run_destroy(back);
  setrank_run_destroy(out);
  setrank_run_destroy(run);
}

TEST_CASE("corpus and queries") {
  setrank_corpus* corpus = nullptr;
  REQUIRE(setrank_corpus_read(data("corpus.jsonl").c_str(), &corpus) == SETRANK_OK);
  CHECK(setrank_corpus_size(corpus) == 14);
  const char* text = nullptr;
  REQUIRE(setrank_corpus_lookup(corpus, "q2d3", &text) == SETRANK_OK);
  CHECK(std::string(text).rfind("q2 passage 3:", 0) == 0);
  CHECK(setrank_corpus_lookup(corpus, "zz", &text) == SETRANK_E_NOT_FOUND);
  setrank_corpus_destroy(corpus);

  setrank_queries* queries = nullptr;
  REQUIRE(setrank_queries_read(data("queries.tsv").c_str(), &queries) == SETRANK_OK);
  CHECK(setrank_queries_size(queries) == 2);
  CHECK(std::string(setrank_queries_id(queries, 1)) == "q2");
  CHECK(std::string(setrank_queries_find(queries, "q1")) == "first test query");
  CHECK(setrank_queries_find(queries, "q9") == nullptr);
  setrank_queries_destroy(queries);
}

TEST_CASE("ndcg through the C API") {
  setrank_run* run = nullptr;
  setrank_qrels* qrels = nullptr;
  REQUIRE(setrank_run_read(data("rank2_run.trec").c_str(), &run) == SETRANK_OK);
  REQUIRE(setrank_qrels_read(data("rank2_qrels.txt").c_str(), &qrels) == SETRANK_OK);
  setrank_ndcg_report* report = nullptr;
  REQUIRE(setrank_evaluate_ndcg(run, qrels, 10, 0, &report) == SETRANK_OK);
  REQUIRE(setrank_ndcg_size(report) == 1);
  CHECK(setrank_ndcg_value(report, 0) == doctest::Approx(1.0 / std::log2(3.0)));
  CHECK(setrank_ndcg_mean(report) == doctest::Approx(1.0 / std::log2(3.0)));
  CHECK(setrank_ndcg_overlapping(report) == 1);
  CHECK(setrank_ndcg_flagged(report, 0) == 0);
  setrank_ndcg_destroy(report);
  CHECK(setrank_evaluate_ndcg(run, qrels, 0, 0, &report) != SETRANK_OK);
  setrank_qrels_destroy(qrels);
  setrank_run_destroy(run);
}

namespace {
void collect(const char* line, void* user) {
  static_cast<std::vector<std::string>*>(user)->push_back(line);
}
}  // namespace

TEST_CASE("simulation streams records") {
  setrank_sim_options options;
  setrank_sim_options_init(&options);
  options.methods = "setwise.heapsort,pairwise.heapsort";
  options.n = 20;
  options.k = 3;
  options.seeds = 4;
  const int cs[] = {3, 5};
  options.c_list = cs;
  options.num_c = 2;
  std::vector<std::string> lines;
  setrank_sim_report* report = nullptr;
  REQUIRE(setrank_simulate(&options, collect, &lines, &report) == SETRANK_OK);
  CHECK(lines.size() == (2 + 1) * 4);
  CHECK(lines.front().find("\"type\":\"record\"") != std::string::npos);
  CHECK(setrank_sim_num_summaries(report) == 3);
  CHECK(std::string(setrank_sim_summary_json(report, 0)).find("\"summary\"") !=
        std::string::npos);
  setrank_sim_destroy(report);

  options.inits = "sorted";
  CHECK(setrank_simulate(&options, nullptr, nullptr, &report) == SETRANK_E_CONFIGURATION);
}

TEST_CASE("http oracle validates its endpoint") {
  setrank_endpoint_options options;
  setrank_endpoint_options_init(&options);
  CHECK(options.max_retries == 3);
  setrank_oracle* oracle = nullptr;
  CHECK(setrank_oracle_create_http(&options, &oracle) == SETRANK_E_INVALID_ARGUMENT);
  options.base_url = "no-scheme";
  CHECK(setrank_oracle_create_http(&options, &oracle) == SETRANK_E_CONFIGURATION);
  options.base_url = "http://127.0.0.1:1";
  options.api_key = "";
  REQUIRE(setrank_oracle_create_http(&options, &oracle) == SETRANK_OK);
  setrank_oracle_destroy(oracle);
  options.templates_dir = "/nonexistent/templates";
  CHECK(setrank_oracle_create_http(&options, &oracle) == SETRANK_E_IO);
}
