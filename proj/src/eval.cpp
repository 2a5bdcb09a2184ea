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

#include "setrank/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace setrank {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size()) break;
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back(line.substr(begin, i - begin));
  }
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\r';
  });
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

const std::unordered_map<std::string, int> kNoJudgments;
const std::vector<RunEntry> kNoEntries;

}  // namespace

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
  if (grade < 0)
    throw Error(ErrorCode::kInvalidArgument, "relevance grades must be >= 0");
  by_query_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  const auto q = by_query_.find(query_id);
  if (q == by_query_.end()) return 0;
  const auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

bool Qrels::has_query(const std::string& query_id) const {
  return by_query_.count(query_id) != 0;
}

const std::unordered_map<std::string, int>& Qrels::judgments(
    const std::string& query_id) const {
  const auto q = by_query_.find(query_id);
  return q == by_query_.end() ? kNoJudgments : q->second;
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> out;
  out.reserve(by_query_.size());
  for (const auto& [id, _] : by_query_) out.push_back(id);
  return out;
}

void RunFile::append(const std::string& query_id, const std::string& doc_id,
                     double score) {
  auto& list = by_query_[query_id];
  if (list.empty() && std::find(order_.begin(), order_.end(), query_id) == order_.end())
    order_.push_back(query_id);
  if (!list.empty() && score > list.back().score)
    throw Error(ErrorCode::kInvalidArgument,
                "run scores must be non-increasing within query " + query_id);
  for (const auto& e : list)
    if (e.doc_id == doc_id)
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate doc " + doc_id + " in query " + query_id);
  list.push_back(RunEntry{doc_id, static_cast<int>(list.size()) + 1, score});
}

const std::vector<RunEntry>& RunFile::entries(const std::string& query_id) const {
  const auto it = by_query_.find(query_id);
  return it == by_query_.end() ? kNoEntries : it->second;
}

bool RunFile::has_query(const std::string& query_id) const {
  return by_query_.count(query_id) != 0;
}

std::string format_score(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

RunFile read_run(std::istream& in) {
  RunFile run;
  bool tagged = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 6)
      throw ParseError("expected 6 fields 'qid Q0 docid rank score tag', got " +
                           std::to_string(f.size()),
                       lineno);
    int rank = 0;
    double score = 0.0;
    if (!parse_number(f[3], rank)) throw ParseError("bad rank '" + std::string(f[3]) + "'", lineno);
    if (!parse_number(f[4], score) || !std::isfinite(score))
      throw ParseError("bad score '" + std::string(f[4]) + "'", lineno);
    const std::string qid(f[0]);
    const std::string docid(f[2]);
    const int expected = static_cast<int>(run.entries(qid).size()) + 1;
    if (rank != expected)
      throw ParseError("rank " + std::to_string(rank) + " for query " + qid +
                           ", expected " + std::to_string(expected),
                       lineno);
    if (!tagged) {
      run.set_tag(std::string(f[5]));
      tagged = true;
    }
    try {
      run.append(qid, docid, score);
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return run;
}

RunFile read_run(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_run(in);
}

void write_run(std::ostream& out, const RunFile& run) {
  for (const auto& qid : run.query_ids())
    for (const auto& e : run.entries(qid))
      out << qid << " Q0 " << e.doc_id << ' ' << e.rank << ' '
          << format_score(e.score) << ' ' << run.tag() << '\n';
}

void write_run(const std::filesystem::path& path, const RunFile& run) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_run(out, run);
  if (!out) throw IoError("write failed for " + path.string());
}

Qrels read_qrels(std::istream& in) {
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 4)
      throw ParseError("expected 4 fields 'qid 0 docid grade', got " +
                           std::to_string(f.size()),
                       lineno);
    int grade = 0;
    if (!parse_number(f[3], grade)) throw ParseError("bad grade '" + std::string(f[3]) + "'", lineno);
    // Negative grades (e.g. -1 "junk" in some collections) count as 0.
    qrels.set(std::string(f[0]), std::string(f[2]), std::max(grade, 0));
  }
  return qrels;
}

Qrels read_qrels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_qrels(in);
}

double ndcg_from_grades(const std::vector<int>& ranked_grades,
                        std::vector<int> judged_grades, int k, Gain gain) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  auto g = [gain](int rel) {
    return gain == Gain::kExponential ? std::exp2(static_cast<double>(rel)) - 1.0
                                      : static_cast<double>(rel);
  };
  auto dcg = [&](const std::vector<int>& grades) {
    double total = 0.0;
    const std::size_t limit = std::min<std::size_t>(grades.size(), k);
    for (std::size_t i = 0; i < limit; ++i)
      total += g(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
    return total;
  };
  std::sort(judged_grades.begin(), judged_grades.end(), std::greater<>());
  const double ideal = dcg(judged_grades);
  if (ideal <= 0.0) return 0.0;
  return dcg(ranked_grades) / ideal;
}

NdcgReport ndcg_at_k(const RunFile& run, const Qrels& qrels, int k, Gain gain) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  NdcgReport report;
  double total = 0.0;
  for (const auto& qid : run.query_ids()) {
    QueryNdcg row;
    row.query_id = qid;
    if (!qrels.has_query(qid)) {
      row.flagged = true;
    } else {
      ++report.overlapping;
      const auto& judged = qrels.judgments(qid);
      std::vector<int> ideal;
      ideal.reserve(judged.size());
      bool any_relevant = false;
      for (const auto& [_, grade] : judged) {
        ideal.push_back(grade);
        any_relevant = any_relevant || grade > 0;
      }
      std::vector<int> ranked;
      for (const auto& e : run.entries(qid)) ranked.push_back(qrels.grade(qid, e.doc_id));
      row.flagged = !any_relevant;
      row.ndcg = ndcg_from_grades(ranked, std::move(ideal), k, gain);
    }
    total += row.ndcg;
    report.per_query.push_back(std::move(row));
  }
  if (!report.per_query.empty())
    report.mean = total / static_cast<double>(report.per_query.size());
  return report;
}

std::unordered_map<std::string, Document> read_corpus(std::istream& in) {
  std::unordered_map<std::string, Document> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (!record.is_object()) throw ParseError("corpus record is not an object", lineno);
    auto pick = [&](std::initializer_list<const char*> keys) -> std::optional<std::string> {
      for (const char* key : keys) {
        const auto it = record.find(key);
        if (it != record.end() && it->is_string()) return it->get<std::string>();
      }
      return std::nullopt;
    };
    auto id = pick({"doc_id", "docid", "id"});
    auto text = pick({"text", "contents"});
    if (!id || id->empty()) throw ParseError("corpus record lacks doc_id", lineno);
    if (!text) throw ParseError("corpus record lacks text", lineno);
    corpus[*id] = Document{*id, std::move(*text)};
  }
  return corpus;
}

std::unordered_map<std::string, Document> read_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_corpus(in);
}

std::vector<Query> read_queries(std::istream& in) {
  std::vector<Query> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError("expected 'query_id<TAB>text'", lineno);
    out.push_back(Query{line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_queries(in);
}

}  // namespace setrank
