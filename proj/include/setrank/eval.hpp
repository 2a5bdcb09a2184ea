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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "setrank/core.hpp"

namespace setrank {

/// Relevance judgments: query id -> doc id -> grade. Missing pairs are 0.
class Qrels {
 public:
  void set(const std::string& query_id, const std::string& doc_id, int grade);
  int grade(const std::string& query_id, const std::string& doc_id) const;
  bool has_query(const std::string& query_id) const;
  /// Grades of one query, empty if the query is unknown.
  const std::unordered_map<std::string, int>& judgments(
      const std::string& query_id) const;
  std::vector<std::string> query_ids() const;

 private:
  std::map<std::string, std::unordered_map<std::string, int>> by_query_;
};

struct RunEntry {
  std::string doc_id;
  int rank = 0;
  double score = 0.0;
  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

/// TREC run: per query, entries ordered by rank 1..N with non-increasing
/// scores. Queries keep their first-seen order.
class RunFile {
 public:
  explicit RunFile(std::string tag = "setrank") : tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  /// Appends the next rank for a query. Throws InvalidArgument when the
  /// score increases or the doc id repeats within the query.
  void append(const std::string& query_id, const std::string& doc_id, double score);

  const std::vector<std::string>& query_ids() const noexcept { return order_; }
  const std::vector<RunEntry>& entries(const std::string& query_id) const;
  bool has_query(const std::string& query_id) const;

  friend bool operator==(const RunFile&, const RunFile&) = default;

 private:
  std::string tag_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<RunEntry>> by_query_;
};

/// Lines `qid Q0 docid rank score tag`. Ranks must run 1..N per query and
/// scores must not increase. Throws ParseError with the line number.
RunFile read_run(std::istream& in);
RunFile read_run(const std::filesystem::path& path);
void write_run(std::ostream& out, const RunFile& run);
void write_run(const std::filesystem::path& path, const RunFile& run);

/// Lines `qid 0 docid grade`.
Qrels read_qrels(std::istream& in);
Qrels read_qrels(const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_score(double value);

enum class Gain { kExponential, kLinear };

struct QueryNdcg {
  std::string query_id;
  double ndcg = 0.0;
  /// Query has no judgments at all, or none with grade > 0. Scores 0.
  bool flagged = false;
};

struct NdcgReport {
  std::vector<QueryNdcg> per_query;
  double mean = 0.0;
  std::size_t overlapping = 0;
};

/// DCG@k / IDCG@k per run query. g(rel) = 2^rel - 1 or rel; discount
/// log2(rank + 1). Queries absent from the qrels are flagged and score 0;
/// the mean is over all run queries.
NdcgReport ndcg_at_k(const RunFile& run, const Qrels& qrels, int k,
                     Gain gain = Gain::kExponential);

/// Single-query NDCG@k for a ranked list of grades against ideal grades.
double ndcg_from_grades(const std::vector<int>& ranked_grades,
                        std::vector<int> judged_grades, int k, Gain gain);

/// Line-delimited JSON records with "doc_id"/"text" (or "id"/"docid" and
/// "contents").
std::unordered_map<std::string, Document> read_corpus(std::istream& in);
std::unordered_map<std::string, Document> read_corpus(const std::filesystem::path& path);

/// `query_id<TAB>text` per line.
std::vector<Query> read_queries(std::istream& in);
std::vector<Query> read_queries(const std::filesystem::path& path);

}  // namespace setrank
