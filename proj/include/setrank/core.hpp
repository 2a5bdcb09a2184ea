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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "setrank/errors.hpp"

namespace setrank {

struct Document {
  std::string doc_id;
  std::string text;
};

struct Query {
  std::string query_id;
  std::string text;
};

enum class Provenance { kAsIs, kInverted, kShuffled };

/// Ordered candidates for one query. Construction validates ids: non-empty,
/// whitespace-free, unique, and at least one document.
class CandidateList {
 public:
  CandidateList(Query query, std::vector<Document> items,
                Provenance provenance = Provenance::kAsIs,
                std::optional<std::uint64_t> shuffle_seed = std::nullopt);

  const Query& query() const noexcept { return query_; }
  const std::vector<Document>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  Provenance provenance() const noexcept { return provenance_; }
  std::optional<std::uint64_t> shuffle_seed() const noexcept { return seed_; }

  CandidateList inverted() const;
  CandidateList shuffled(std::uint64_t seed) const;

 private:
  Query query_;
  std::vector<Document> items_;
  Provenance provenance_;
  std::optional<std::uint64_t> seed_;
};

enum class Method {
  kPointwiseQlm,
  kPointwiseYesNo,
  kListwiseGeneration,
  kListwiseLikelihood,
  kPairwiseAllpair,
  kPairwiseHeapsort,
  kPairwiseBubblesort,
  kSetwiseHeapsort,
  kSetwiseBubblesort,
};

inline constexpr Method kAllMethods[] = {
    Method::kPointwiseQlm,       Method::kPointwiseYesNo,
    Method::kListwiseGeneration, Method::kListwiseLikelihood,
    Method::kPairwiseAllpair,    Method::kPairwiseHeapsort,
    Method::kPairwiseBubblesort, Method::kSetwiseHeapsort,
    Method::kSetwiseBubblesort,
};

std::string_view method_name(Method method) noexcept;
/// Accepts the dotted names ("setwise.heapsort"); "listwise.generate" is an
/// alias of "listwise.generation". Throws ConfigurationError otherwise.
Method parse_method(std::string_view name);

bool is_pairwise(Method method) noexcept;
bool is_listwise(Method method) noexcept;
bool is_pointwise(Method method) noexcept;

enum class ScoringMode { kGeneration, kLogits };

/// Document truncation default for a given set size.
int default_max_doc_tokens(int c) noexcept;

struct RankerConfig {
  Method method = Method::kSetwiseHeapsort;
  int k = 10;
  int c = 3;
  int w = 4;
  int s = 2;
  int r = 5;
  std::optional<int> max_doc_tokens;
  ScoringMode scoring_mode = ScoringMode::kGeneration;

  /// c after the pairwise override (pairwise methods always compare 2).
  int effective_c() const noexcept { return is_pairwise(method) ? 2 : c; }
  /// Explicit value if set, otherwise 100 for listwise windows and the
  /// per-c table for everything else.
  int resolved_max_doc_tokens() const noexcept;

  /// Checks everything that does not depend on N. Throws ConfigurationError.
  void validate() const;
  void validate_for(std::size_t n) const;
};

/// Plain counter values; what RankResult carries and what reports print.
struct CostCounts {
  std::uint64_t num_inferences = 0;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t generated_tokens = 0;
  std::uint64_t parse_failures = 0;
  std::chrono::nanoseconds wall_time{0};

  CostCounts& operator+=(const CostCounts& other) noexcept;
  double wall_seconds() const noexcept {
    return std::chrono::duration<double>(wall_time).count();
  }
};

struct Usage {
  std::uint64_t prompt_tokens = 0;
  std::uint64_t generated_tokens = 0;
};

/// Per-query cost accounting. Counters only grow; all members are safe to
/// bump from concurrent batch workers.
class CostLedger {
 public:
  CostLedger() = default;
  CostLedger(const CostLedger&) = delete;
  CostLedger& operator=(const CostLedger&) = delete;

  void record_inference(const Usage& usage) noexcept;
  void record_parse_failure() noexcept;
  void add_wall_time(std::chrono::nanoseconds elapsed) noexcept;

  CostCounts snapshot() const noexcept;

 private:
  std::atomic<std::uint64_t> inferences_{0};
  std::atomic<std::uint64_t> prompt_tokens_{0};
  std::atomic<std::uint64_t> generated_tokens_{0};
  std::atomic<std::uint64_t> parse_failures_{0};
  std::atomic<std::int64_t> wall_ns_{0};
};

inline constexpr int kMaxLabels = 26;

/// Index of a document within one prompt (0 -> 'A').
struct Label {
  int index = 0;
  friend bool operator==(Label, Label) = default;
};

char label_letter(int index);
/// "Passage A" for 0. Throws LabelOverflow for index outside [0, 26).
std::string render_label(int index);
/// Inverse of render_label; also accepts the bare letter. nullopt otherwise.
std::optional<Label> parse_label(std::string_view text);

}  // namespace setrank
