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

#include "setrank/rankers.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

namespace setrank {

namespace {

class WallTimer {
 public:
  explicit WallTimer(CostLedger& ledger)
      : ledger_(ledger), start_(std::chrono::steady_clock::now()) {}
  ~WallTimer() { ledger_.add_wall_time(std::chrono::steady_clock::now() - start_); }

 private:
  CostLedger& ledger_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<Document> gather(const CandidateList& candidates,
                             std::span<const std::size_t> items) {
  std::vector<Document> docs;
  docs.reserve(items.size());
  for (std::size_t i : items) docs.push_back(candidates.items()[i]);
  return docs;
}

RankResult finish(const CandidateList& candidates,
                  std::span<const std::size_t> order, CostLedger& ledger,
                  std::vector<double> scores = {}) {
  RankResult result;
  result.doc_ids.reserve(order.size());
  for (std::size_t i : order) result.doc_ids.push_back(candidates.items()[i].doc_id);
  result.cost = ledger.snapshot();
  result.scores = std::move(scores);
  return result;
}

/// Highest probability wins; ties go to the earlier label.
std::size_t argmax(const std::vector<double>& probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

std::size_t checked_position(int label, std::size_t n) {
  return label >= 0 && static_cast<std::size_t>(label) < n
             ? static_cast<std::size_t>(label)
             : 0;
}

/// Presentation-order positions sorted by descending probability, stable.
std::vector<std::size_t> order_by_probability(const std::vector<double>& probs) {
  auto order = identity(probs.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  return order;
}

void require_capabilities(const RankerConfig& config, const Capabilities& caps) {
  const auto name = std::string(method_name(config.method));
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw CapabilityUnsupported(name + " requires " + what);
  };
  switch (config.method) {
    case Method::kPointwiseQlm:
      need(caps.query_likelihood, "query-likelihood scoring");
      break;
    case Method::kPointwiseYesNo:
      need(caps.logits, "access to output logits");
      break;
    case Method::kListwiseGeneration:
      need(caps.generate, "text generation");
      break;
    case Method::kListwiseLikelihood:
      need(caps.logits, "access to output logits");
      break;
    case Method::kPairwiseAllpair:
    case Method::kPairwiseHeapsort:
    case Method::kPairwiseBubblesort:
      need(caps.generate, "text generation");
      break;
    case Method::kSetwiseHeapsort:
    case Method::kSetwiseBubblesort:
      if (config.scoring_mode == ScoringMode::kLogits)
        need(caps.logits, "access to output logits");
      else
        need(caps.generate, "text generation");
      break;
  }
}

}  // namespace

Selector make_oracle_selector(const CandidateList& candidates, Oracle& oracle,
                              const RankerConfig& config, CostLedger& ledger) {
  const bool pairwise = is_pairwise(config.method);
  const int budget = config.resolved_max_doc_tokens();
  const ScoringMode mode = config.scoring_mode;
  return [&candidates, &oracle, &ledger, pairwise, budget,
          mode](std::span<const std::size_t> items) -> std::size_t {
    OracleRequest request;
    request.kind = pairwise ? RequestKind::kPreferPair
                            : RequestKind::kSelectMostRelevant;
    request.query = candidates.query();
    request.docs = gather(candidates, items);
    request.mode = pairwise ? ScoringMode::kGeneration : mode;
    request.max_doc_tokens = budget;
    const OracleResponse response = consult(oracle, request, ledger);
    const std::size_t n = items.size();
    if (const auto* v = std::get_if<response::Selected>(&response.value))
      return checked_position(v->label.index, n);
    if (const auto* v = std::get_if<response::Preferred>(&response.value))
      return checked_position(v->label.index, n);
    if (const auto* v = std::get_if<response::LabelDistribution>(&response.value))
      return v->probabilities.size() == n ? argmax(v->probabilities) : 0;
    return 0;
  };
}

HeapState::HeapState(std::vector<std::size_t> initial, int c)
    : slots(std::move(initial)),
      arity(static_cast<std::size_t>(std::max(2, c - 1))),
      set_size(static_cast<std::size_t>(c)) {
  if (c < 2) throw ConfigurationError("heap set size c must be >= 2");
}

void heap_sift_down(HeapState& heap, std::size_t node, const Selector& select) {
  const std::size_t per_call = heap.set_size - 1;
  std::vector<std::size_t> items;
  items.reserve(heap.set_size);
  for (;;) {
    const std::size_t first = heap.arity * node + 1;
    if (first >= heap.size()) return;
    const std::size_t last = std::min(first + heap.arity, heap.size());
    std::size_t best = node;
    for (std::size_t chunk = first; chunk < last; chunk += per_call) {
      const std::size_t chunk_end = std::min(chunk + per_call, last);
      items.clear();
      items.push_back(heap.slots[best]);
      for (std::size_t j = chunk; j < chunk_end; ++j) items.push_back(heap.slots[j]);
      const std::size_t pos = select(items);
      if (pos > 0) best = chunk + pos - 1;
    }
    if (best == node) return;
    std::swap(heap.slots[node], heap.slots[best]);
    node = best;
  }
}

void heap_build(HeapState& heap, const Selector& select) {
  if (heap.size() < 2) return;
  for (std::size_t i = (heap.size() - 2) / heap.arity + 1; i-- > 0;)
    heap_sift_down(heap, i, select);
}

bool bubble_pass(std::vector<std::size_t>& order, std::size_t p, int c,
                 const Selector& select) {
  if (order.size() < 2) return false;
  const std::size_t span = static_cast<std::size_t>(c) - 1;
  bool moved = false;
  std::size_t pos = order.size() - 1;
  while (pos > p) {
    const std::size_t lo = pos - p > span ? pos - span : p;
    const std::span<const std::size_t> window(order.data() + lo, pos - lo + 1);
    const std::size_t winner = select(window);
    if (winner > 0 && winner < window.size()) {
      std::swap(order[lo], order[lo + winner]);
      moved = true;
    }
    pos = lo;
  }
  return moved;
}

RankResult rank_pointwise(const CandidateList& candidates, Oracle& oracle,
                          const RankerConfig& config) {
  CostLedger ledger;
  std::vector<double> scores;
  {
    WallTimer timer(ledger);
    const auto kind = config.method == Method::kPointwiseQlm
                          ? RequestKind::kScoreQueryLikelihood
                          : RequestKind::kScoreYesNo;
    std::vector<OracleRequest> requests;
    requests.reserve(candidates.size());
    for (const auto& doc : candidates.items()) {
      OracleRequest request;
      request.kind = kind;
      request.query = candidates.query();
      request.docs = {doc};
      request.mode = ScoringMode::kLogits;
      request.max_doc_tokens = config.resolved_max_doc_tokens();
      requests.push_back(std::move(request));
    }
    const auto responses = consult_batch(oracle, requests, ledger);
    scores.reserve(responses.size());
    for (const auto& response : responses) {
      const auto* score = std::get_if<response::Score>(&response.value);
      scores.push_back(score ? score->value
                             : -std::numeric_limits<double>::infinity());
    }
  }
  auto order = identity(candidates.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> sorted_scores;
  sorted_scores.reserve(order.size());
  for (std::size_t i : order) sorted_scores.push_back(scores[i]);
  return finish(candidates, order, ledger, std::move(sorted_scores));
}

RankResult rank_listwise(const CandidateList& candidates, Oracle& oracle,
                         const RankerConfig& config) {
  CostLedger ledger;
  const std::size_t n = candidates.size();
  auto order = identity(n);
  {
    WallTimer timer(ledger);
    const std::size_t w = static_cast<std::size_t>(config.w);
    const std::size_t s = static_cast<std::size_t>(config.s);
    const ScoringMode mode = config.method == Method::kListwiseLikelihood
                                 ? ScoringMode::kLogits
                                 : ScoringMode::kGeneration;
    auto rerank_window = [&](std::size_t start, std::size_t len) {
      const std::span<const std::size_t> window(order.data() + start, len);
      OracleRequest request;
      request.kind = RequestKind::kOrderWindow;
      request.query = candidates.query();
      request.docs = gather(candidates, window);
      request.mode = mode;
      request.max_doc_tokens = config.resolved_max_doc_tokens();
      const OracleResponse response = consult(oracle, request, ledger);

      std::vector<std::size_t> positions;
      if (const auto* v = std::get_if<response::Ordered>(&response.value)) {
        for (Label l : v->labels) positions.push_back(checked_position(l.index, len));
      } else if (const auto* v =
                     std::get_if<response::LabelDistribution>(&response.value)) {
        if (v->probabilities.size() == len) positions = order_by_probability(v->probabilities);
      }
      std::vector<bool> used(len, false);
      std::vector<std::size_t> valid;
      for (std::size_t pos : positions)
        if (!used[pos]) {
          used[pos] = true;
          valid.push_back(pos);
        }
      if (valid.size() != len) return;  // no change on failure
      std::vector<std::size_t> reordered;
      reordered.reserve(len);
      for (std::size_t pos : valid) reordered.push_back(window[pos]);
      std::copy(reordered.begin(), reordered.end(), order.begin() + start);
    };

    if (n >= 2) {
      for (int pass = 0; pass < config.r; ++pass) {
        if (n <= w) {
          rerank_window(0, n);
          continue;
        }
        std::size_t start = n - w;
        for (;;) {
          rerank_window(start, w);
          if (start == 0) break;
          start = start > s ? start - s : 0;
        }
      }
    }
  }
  return finish(candidates, order, ledger);
}

RankResult rank_pairwise_allpair(const CandidateList& candidates, Oracle& oracle,
                                 const RankerConfig& config) {
  CostLedger ledger;
  const std::size_t n = candidates.size();
  std::vector<double> wins(n, 0.0);
  {
    WallTimer timer(ledger);
    std::vector<OracleRequest> requests;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    requests.reserve(n * (n - 1));
    pairs.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        OracleRequest request;
        request.kind = RequestKind::kPreferPair;
        request.query = candidates.query();
        request.docs = {candidates.items()[i], candidates.items()[j]};
        request.max_doc_tokens = config.resolved_max_doc_tokens();
        requests.push_back(std::move(request));
        pairs.emplace_back(i, j);
      }
    const auto responses = consult_batch(oracle, requests, ledger);
    for (std::size_t q = 0; q < responses.size(); ++q) {
      std::size_t pos = 0;
      if (const auto* v = std::get_if<response::Preferred>(&responses[q].value))
        pos = checked_position(v->label.index, 2);
      else if (const auto* v = std::get_if<response::Selected>(&responses[q].value))
        pos = checked_position(v->label.index, 2);
      wins[pos == 0 ? pairs[q].first : pairs[q].second] += 1.0;
    }
  }
  auto order = identity(n);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return wins[a] > wins[b]; });
  std::vector<double> sorted;
  sorted.reserve(n);
  for (std::size_t i : order) sorted.push_back(wins[i]);
  return finish(candidates, order, ledger, std::move(sorted));
}

RankResult rank_sorted_heap(const CandidateList& candidates, Oracle& oracle,
                            const RankerConfig& config) {
  CostLedger ledger;
  std::vector<std::size_t> order;
  {
    WallTimer timer(ledger);
    const Selector select = make_oracle_selector(candidates, oracle, config, ledger);
    HeapState heap(identity(candidates.size()), config.effective_c());
    heap_build(heap, select);
    const std::size_t k = std::min<std::size_t>(config.k, candidates.size());
    order.reserve(candidates.size());
    for (std::size_t p = 0; p < k; ++p) {
      order.push_back(heap.slots.front());
      heap.slots.front() = heap.slots.back();
      heap.slots.pop_back();
      if (p + 1 < k && heap.size() > 1) heap_sift_down(heap, 0, select);
    }
    order.insert(order.end(), heap.slots.begin(), heap.slots.end());
  }
  return finish(candidates, order, ledger);
}

RankResult rank_sorted_bubble(const CandidateList& candidates, Oracle& oracle,
                              const RankerConfig& config) {
  CostLedger ledger;
  auto order = identity(candidates.size());
  {
    WallTimer timer(ledger);
    const Selector select = make_oracle_selector(candidates, oracle, config, ledger);
    const int c = config.effective_c();
    const std::size_t k = std::min<std::size_t>(config.k, candidates.size());
    for (std::size_t p = 0; p < k; ++p) {
      const bool moved = bubble_pass(order, p, c, select);
      // At c = 2 a pass without swaps proves the suffix is sorted.
      if (!moved && c == 2) break;
    }
  }
  return finish(candidates, order, ledger);
}

RankResult rank(const CandidateList& candidates, Oracle& oracle,
                const RankerConfig& config) {
  config.validate_for(candidates.size());
  require_capabilities(config, oracle.capabilities());
  switch (config.method) {
    case Method::kPointwiseQlm:
    case Method::kPointwiseYesNo:
      return rank_pointwise(candidates, oracle, config);
    case Method::kListwiseGeneration:
    case Method::kListwiseLikelihood:
      return rank_listwise(candidates, oracle, config);
    case Method::kPairwiseAllpair:
      return rank_pairwise_allpair(candidates, oracle, config);
    case Method::kPairwiseHeapsort:
    case Method::kSetwiseHeapsort:
      return rank_sorted_heap(candidates, oracle, config);
    case Method::kPairwiseBubblesort:
    case Method::kSetwiseBubblesort:
      return rank_sorted_bubble(candidates, oracle, config);
  }
  throw ConfigurationError("unknown method");
}

std::uint64_t max_inferences(const RankerConfig& config, std::size_t n) {
  const std::uint64_t N = n;
  const std::uint64_t k = std::min<std::uint64_t>(config.k, N);
  switch (config.method) {
    case Method::kPointwiseQlm:
    case Method::kPointwiseYesNo:
      return N;
    case Method::kPairwiseAllpair:
      return N * N - N;
    case Method::kListwiseGeneration:
    case Method::kListwiseLikelihood: {
      if (N < 2) return 0;
      const std::uint64_t w = config.w, s = config.s, r = config.r;
      if (N <= w) return r;
      return r * ((N - w + s - 1) / s + 1);
    }
    case Method::kPairwiseHeapsort:
    case Method::kSetwiseHeapsort: {
      if (N < 2) return 0;
      const std::uint64_t c = config.effective_c();
      const std::uint64_t m = std::max<std::uint64_t>(2, c - 1);
      const std::uint64_t per_level = (m + c - 2) / (c - 1);
      // floor(log_m((m - 1) * N))
      std::uint64_t height = 0;
      for (std::uint64_t x = (m - 1) * N; x >= m; x /= m) ++height;
      return per_level * (N + k * (1 + height));
    }
    case Method::kPairwiseBubblesort:
    case Method::kSetwiseBubblesort: {
      const std::uint64_t span = config.effective_c() - 1;
      std::uint64_t total = 0;
      for (std::uint64_t p = 0; p < k && p + 1 < N; ++p)
        total += (N - 1 - p + span - 1) / span;
      return total;
    }
  }
  return 0;
}

}  // namespace setrank
