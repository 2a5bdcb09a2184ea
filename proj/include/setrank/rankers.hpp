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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "setrank/core.hpp"
#include "setrank/oracle.hpp"

namespace setrank {

struct RankResult {
  /// Permutation of the input ids; the first k are the method's top-k.
  std::vector<std::string> doc_ids;
  CostCounts cost;
  /// Aligned with doc_ids for pointwise (oracle score) and allpair (wins);
  /// empty for sort-based methods.
  std::vector<double> scores;
};

/// Picks the preferred item of a comparison set. Items are candidate
/// indices in presentation order; the return value is a position in
/// `items`. Position 0 is the "no change" answer.
using Selector = std::function<std::size_t(std::span<const std::size_t> items)>;

/// Selector backed by an oracle. Pairwise methods issue PreferPair (sets of
/// exactly 2); setwise methods issue SelectMostRelevant in the configured
/// scoring mode. Unparseable answers fall back to position 0.
Selector make_oracle_selector(const CandidateList& candidates, Oracle& oracle,
                              const RankerConfig& config, CostLedger& ledger);

/// Implicit m-ary max-heap over candidate indices, m = max(2, c - 1).
/// A sift step compares the current winner with up to c - 1 children per
/// call, so c >= 3 needs one call per level and c = 2 needs two.
struct HeapState {
  std::vector<std::size_t> slots;
  std::size_t arity = 2;
  std::size_t set_size = 3;

  HeapState(std::vector<std::size_t> initial, int c);
  std::size_t size() const noexcept { return slots.size(); }
};

void heap_sift_down(HeapState& heap, std::size_t node, const Selector& select);
/// Bottom-up heapify: sift_down on every internal node, last to first.
void heap_build(HeapState& heap, const Selector& select);

/// One bubbling pass that brings the best of positions [p, N) to p, moving
/// bottom-up in windows of c that overlap by the carried winner. Returns
/// whether any winner moved.
bool bubble_pass(std::vector<std::size_t>& order, std::size_t p, int c,
                 const Selector& select);

RankResult rank_pointwise(const CandidateList& candidates, Oracle& oracle,
                          const RankerConfig& config);
RankResult rank_listwise(const CandidateList& candidates, Oracle& oracle,
                         const RankerConfig& config);
RankResult rank_pairwise_allpair(const CandidateList& candidates, Oracle& oracle,
                                 const RankerConfig& config);
RankResult rank_sorted_heap(const CandidateList& candidates, Oracle& oracle,
                            const RankerConfig& config);
RankResult rank_sorted_bubble(const CandidateList& candidates, Oracle& oracle,
                              const RankerConfig& config);

/// Validates the config against N and the oracle's capabilities, then
/// dispatches on config.method.
RankResult rank(const CandidateList& candidates, Oracle& oracle,
                const RankerConfig& config);

/// Worst-case oracle calls for a method at size N (exact for pointwise,
/// listwise, allpair).
std::uint64_t max_inferences(const RankerConfig& config, std::size_t n);

}  // namespace setrank
