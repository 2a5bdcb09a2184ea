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

#include "setrank/core.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "random.hpp"

namespace setrank {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfiguration: return "ConfigurationError";
    case ErrorCode::kCapabilityUnsupported: return "CapabilityUnsupported";
    case ErrorCode::kLabelOverflow: return "LabelOverflow";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kTransport: return "RetriableTransportError";
  }
  return "Unknown";
}

namespace {

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char ch) { return std::isspace(ch) != 0; });
}

}  // namespace

CandidateList::CandidateList(Query query, std::vector<Document> items,
                             Provenance provenance,
                             std::optional<std::uint64_t> shuffle_seed)
    : query_(std::move(query)),
      items_(std::move(items)),
      provenance_(provenance),
      seed_(shuffle_seed) {
  if (query_.query_id.empty() || has_whitespace(query_.query_id))
    throw Error(ErrorCode::kInvalidArgument,
                "query id must be non-empty and whitespace-free: '" +
                    query_.query_id + "'");
  if (items_.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "candidate list for query " + query_.query_id + " is empty");
  std::unordered_set<std::string_view> seen;
  seen.reserve(items_.size());
  for (const auto& doc : items_) {
    if (doc.doc_id.empty() || has_whitespace(doc.doc_id))
      throw Error(ErrorCode::kInvalidArgument,
                  "doc id must be non-empty and whitespace-free: '" +
                      doc.doc_id + "'");
    if (!seen.insert(doc.doc_id).second)
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate doc id " + doc.doc_id);
  }
}

CandidateList CandidateList::inverted() const {
  std::vector<Document> items(items_.rbegin(), items_.rend());
  return CandidateList(query_, std::move(items), Provenance::kInverted);
}

CandidateList CandidateList::shuffled(std::uint64_t seed) const {
  std::vector<Document> items = items_;
  std::mt19937_64 rng(detail::mix_seed(seed, 0x5348));
  detail::fisher_yates(items, rng);
  return CandidateList(query_, std::move(items), Provenance::kShuffled, seed);
}

std::string_view method_name(Method method) noexcept {
  switch (method) {
    case Method::kPointwiseQlm: return "pointwise.qlm";
    case Method::kPointwiseYesNo: return "pointwise.yes_no";
    case Method::kListwiseGeneration: return "listwise.generation";
    case Method::kListwiseLikelihood: return "listwise.likelihood";
    case Method::kPairwiseAllpair: return "pairwise.allpair";
    case Method::kPairwiseHeapsort: return "pairwise.heapsort";
    case Method::kPairwiseBubblesort: return "pairwise.bubblesort";
    case Method::kSetwiseHeapsort: return "setwise.heapsort";
    case Method::kSetwiseBubblesort: return "setwise.bubblesort";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (method_name(m) == name) return m;
  if (name == "listwise.generate") return Method::kListwiseGeneration;
  throw ConfigurationError("unknown method '" + std::string(name) + "'");
}

bool is_pairwise(Method method) noexcept {
  return method == Method::kPairwiseAllpair ||
         method == Method::kPairwiseHeapsort ||
         method == Method::kPairwiseBubblesort;
}

bool is_listwise(Method method) noexcept {
  return method == Method::kListwiseGeneration ||
         method == Method::kListwiseLikelihood;
}

bool is_pointwise(Method method) noexcept {
  return method == Method::kPointwiseQlm || method == Method::kPointwiseYesNo;
}

int default_max_doc_tokens(int c) noexcept {
  if (c <= 3) return 128;
  if (c <= 5) return 85;
  if (c <= 7) return 60;
  return 45;
}

int RankerConfig::resolved_max_doc_tokens() const noexcept {
  if (max_doc_tokens) return *max_doc_tokens;
  if (is_listwise(method)) return 100;
  return default_max_doc_tokens(effective_c());
}

void RankerConfig::validate() const {
  if (k < 1) throw ConfigurationError("k must be >= 1");
  if (c < 2) throw ConfigurationError("c must be >= 2");
  if (c > kMaxLabels)
    throw ConfigurationError("c must be <= 26 (label alphabet)");
  if (w < 2) throw ConfigurationError("w must be >= 2");
  if (w > kMaxLabels)
    throw ConfigurationError("w must be <= 26 (label alphabet)");
  if (s < 1 || s > w) throw ConfigurationError("s must satisfy 1 <= s <= w");
  if (r < 1) throw ConfigurationError("r must be >= 1");
  if (max_doc_tokens && *max_doc_tokens < 1)
    throw ConfigurationError("max_doc_tokens must be >= 1");
}

void RankerConfig::validate_for(std::size_t n) const {
  validate();
  if (static_cast<std::size_t>(k) > n)
    throw ConfigurationError("k=" + std::to_string(k) + " exceeds N=" +
                             std::to_string(n));
}

CostCounts& CostCounts::operator+=(const CostCounts& other) noexcept {
  num_inferences += other.num_inferences;
  prompt_tokens += other.prompt_tokens;
  generated_tokens += other.generated_tokens;
  parse_failures += other.parse_failures;
  wall_time += other.wall_time;
  return *this;
}

void CostLedger::record_inference(const Usage& usage) noexcept {
  inferences_.fetch_add(1, std::memory_order_relaxed);
  prompt_tokens_.fetch_add(usage.prompt_tokens, std::memory_order_relaxed);
  generated_tokens_.fetch_add(usage.generated_tokens, std::memory_order_relaxed);
}

void CostLedger::record_parse_failure() noexcept {
  parse_failures_.fetch_add(1, std::memory_order_relaxed);
}

void CostLedger::add_wall_time(std::chrono::nanoseconds elapsed) noexcept {
  if (elapsed.count() > 0)
    wall_ns_.fetch_add(elapsed.count(), std::memory_order_relaxed);
}

CostCounts CostLedger::snapshot() const noexcept {
  CostCounts out;
  out.num_inferences = inferences_.load(std::memory_order_relaxed);
  out.prompt_tokens = prompt_tokens_.load(std::memory_order_relaxed);
  out.generated_tokens = generated_tokens_.load(std::memory_order_relaxed);
  out.parse_failures = parse_failures_.load(std::memory_order_relaxed);
  out.wall_time = std::chrono::nanoseconds(wall_ns_.load(std::memory_order_relaxed));
  return out;
}

char label_letter(int index) {
  if (index < 0 || index >= kMaxLabels)
    throw LabelOverflow("label index " + std::to_string(index) +
                        " outside A..Z");
  return static_cast<char>('A' + index);
}

std::string render_label(int index) {
  return std::string("Passage ") + label_letter(index);
}

std::optional<Label> parse_label(std::string_view text) {
  constexpr std::string_view kPrefix = "Passage ";
  if (text.size() == kPrefix.size() + 1 && text.substr(0, kPrefix.size()) == kPrefix)
    text.remove_prefix(kPrefix.size());
  if (text.size() == 1 && text[0] >= 'A' && text[0] <= 'Z')
    return Label{text[0] - 'A'};
  return std::nullopt;
}

}  // namespace setrank
