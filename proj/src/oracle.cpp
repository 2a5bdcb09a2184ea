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

#include "setrank/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "random.hpp"

namespace setrank {

std::string_view request_kind_name(RequestKind kind) noexcept {
  switch (kind) {
    case RequestKind::kScoreQueryLikelihood: return "ScoreQueryLikelihood";
    case RequestKind::kScoreYesNo: return "ScoreYesNo";
    case RequestKind::kSelectMostRelevant: return "SelectMostRelevant";
    case RequestKind::kOrderWindow: return "OrderWindow";
    case RequestKind::kPreferPair: return "PreferPair";
  }
  return "Unknown";
}

void OracleRequest::validate() const {
  const std::size_t n = docs.size();
  switch (kind) {
    case RequestKind::kScoreQueryLikelihood:
    case RequestKind::kScoreYesNo:
      if (n != 1)
        throw ArityMismatch(std::string(request_kind_name(kind)) +
                            " carries exactly 1 document, got " + std::to_string(n));
      break;
    case RequestKind::kPreferPair:
      if (n != 2)
        throw ArityMismatch("PreferPair carries exactly 2 documents, got " +
                            std::to_string(n));
      break;
    case RequestKind::kSelectMostRelevant:
    case RequestKind::kOrderWindow:
      if (n < 2 || n > static_cast<std::size_t>(kMaxLabels))
        throw ArityMismatch(std::string(request_kind_name(kind)) +
                            " carries 2..26 documents, got " + std::to_string(n));
      break;
  }
  if (max_doc_tokens < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_doc_tokens must be >= 1");
}

Method OracleRequest::prompt_method() const noexcept {
  switch (kind) {
    case RequestKind::kScoreQueryLikelihood: return Method::kPointwiseQlm;
    case RequestKind::kScoreYesNo: return Method::kPointwiseYesNo;
    case RequestKind::kPreferPair: return Method::kPairwiseHeapsort;
    case RequestKind::kOrderWindow:
      return mode == ScoringMode::kLogits ? Method::kListwiseLikelihood
                                          : Method::kListwiseGeneration;
    case RequestKind::kSelectMostRelevant: return Method::kSetwiseHeapsort;
  }
  return Method::kSetwiseHeapsort;
}

std::vector<OracleResponse> Oracle::ask_batch(
    std::span<const OracleRequest> requests) {
  std::vector<OracleResponse> out;
  out.reserve(requests.size());
  for (const auto& request : requests) out.push_back(ask(request));
  return out;
}

OracleResponse consult(Oracle& oracle, const OracleRequest& request,
                       CostLedger& ledger) {
  OracleResponse response = oracle.ask(request);
  ledger.record_inference(response.usage);
  if (response.failed()) ledger.record_parse_failure();
  return response;
}

std::vector<OracleResponse> consult_batch(Oracle& oracle,
                                          std::span<const OracleRequest> requests,
                                          CostLedger& ledger) {
  if (requests.empty()) return {};
  auto responses = oracle.ask_batch(requests);
  for (const auto& response : responses) {
    ledger.record_inference(response.usage);
    if (response.failed()) ledger.record_parse_failure();
  }
  return responses;
}

MockOracle::MockOracle(MockOracleSpec spec, Capabilities caps,
                       const PromptTemplates& templates)
    : spec_(std::move(spec)), caps_(caps), templates_(&templates) {
  if (spec_.noise_p < 0.0 || spec_.noise_p > 1.0)
    throw Error(ErrorCode::kInvalidArgument, "noise_p must lie in [0, 1]");
  bool first = true;
  for (const auto& [id, score] : spec_.true_score) {
    if (first || score < min_score_) min_score_ = score;
    if (first || score > max_score_) max_score_ = score;
    first = false;
  }
}

double MockOracle::true_score(const std::string& doc_id) const {
  const auto it = spec_.true_score.find(doc_id);
  if (it == spec_.true_score.end())
    throw Error(ErrorCode::kInvalidArgument,
                "mock oracle has no true score for document " + doc_id);
  return it->second;
}

OracleResponse MockOracle::ask(const OracleRequest& request) {
  return answer(request, next_ordinal_.fetch_add(1, std::memory_order_relaxed));
}

std::vector<OracleResponse> MockOracle::ask_batch(
    std::span<const OracleRequest> requests) {
  const std::uint64_t base =
      next_ordinal_.fetch_add(requests.size(), std::memory_order_relaxed);
  std::vector<OracleResponse> out;
  out.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i)
    out.push_back(answer(requests[i], base + i));
  return out;
}

Usage MockOracle::usage_for(const OracleRequest& request,
                            std::string_view answer) const {
  const auto& tokenizer = default_tokenizer();
  const Method method = request.prompt_method();
  std::string prompt = templates_->render(template_for(method), request.query,
                                          request.docs, request.max_doc_tokens,
                                          tokenizer);
  Usage usage;
  usage.prompt_tokens = tokenizer.count(prompt);
  if (request.kind == RequestKind::kScoreQueryLikelihood)
    usage.prompt_tokens += tokenizer.count(qlm_continuation(request.query));
  usage.generated_tokens = tokenizer.count(answer);
  return usage;
}

OracleResponse MockOracle::answer(const OracleRequest& request,
                                  std::uint64_t ordinal) const {
  request.validate();
  const bool logits = request.mode == ScoringMode::kLogits;
  const std::size_t n = request.docs.size();

  std::vector<double> scores;
  scores.reserve(n);
  for (const auto& doc : request.docs) scores.push_back(true_score(doc.doc_id));

  std::mt19937_64 rng(detail::mix_seed(spec_.rng_seed, ordinal));
  const bool noisy =
      spec_.noise_p > 0.0 && detail::uniform_unit(rng) < spec_.noise_p;

  switch (request.kind) {
    case RequestKind::kScoreQueryLikelihood:
    case RequestKind::kScoreYesNo: {
      if (request.kind == RequestKind::kScoreQueryLikelihood
              ? !caps_.query_likelihood
              : !caps_.logits)
        throw CapabilityUnsupported(std::string(request_kind_name(request.kind)) +
                                    " needs token likelihoods");
      double value = scores[0];
      if (noisy)
        value = min_score_ + (max_score_ - min_score_) * detail::uniform_unit(rng);
      return {response::Score{value}, usage_for(request, "")};
    }

    case RequestKind::kSelectMostRelevant:
    case RequestKind::kPreferPair: {
      if (logits && !caps_.logits)
        throw CapabilityUnsupported("mock configured without label logits");
      if (!logits && !caps_.generate)
        throw CapabilityUnsupported("mock configured without generation");
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (scores[i] > scores[best]) best = i;
      if (noisy) {
        std::size_t other = detail::uniform_below(rng, n - 1);
        if (other >= best) ++other;
        best = other;
      }
      const Label label{static_cast<int>(best)};
      if (logits && request.kind == RequestKind::kSelectMostRelevant) {
        std::vector<double> probs(n, 0.0);
        probs[best] = 1.0;
        return {response::LabelDistribution{std::move(probs)},
                usage_for(request, "")};
      }
      const std::string text(1, label_letter(label.index));
      if (request.kind == RequestKind::kPreferPair)
        return {response::Preferred{label}, usage_for(request, text)};
      return {response::Selected{label}, usage_for(request, text)};
    }

    case RequestKind::kOrderWindow: {
      if (logits && !caps_.logits)
        throw CapabilityUnsupported("mock configured without label logits");
      if (!logits && !caps_.generate)
        throw CapabilityUnsupported("mock configured without generation");
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
      if (noisy) {
        const std::size_t j = 1 + detail::uniform_below(rng, n - 1);
        std::swap(order[0], order[j]);
      }
      if (logits) {
        // Mass decreases with rank; equal true scores share mass unless
        // noise reshuffled the head.
        std::vector<double> weight(n, 0.0);
        std::size_t j = 0;
        while (j < n) {
          std::size_t end = j + 1;
          while (!noisy && end < n && scores[order[end]] == scores[order[j]]) ++end;
          double mass = 0.0;
          for (std::size_t q = j; q < end; ++q) mass += static_cast<double>(n - q);
          for (std::size_t q = j; q < end; ++q)
            weight[order[q]] = mass / static_cast<double>(end - j);
          j = end;
        }
        const double total = static_cast<double>(n * (n + 1) / 2);
        for (double& w : weight) w /= total;
        return {response::LabelDistribution{std::move(weight)},
                usage_for(request, "")};
      }
      std::vector<Label> labels;
      std::string text;
      for (std::size_t q = 0; q < n; ++q) {
        labels.push_back(Label{static_cast<int>(order[q])});
        if (q) text += " > ";
        text += label_letter(static_cast<int>(order[q]));
      }
      return {response::Ordered{std::move(labels)}, usage_for(request, text)};
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown request kind");
}

void RecordingOracle::log(const OracleRequest& request) {
  std::vector<std::string> ids;
  ids.reserve(request.docs.size());
  for (const auto& doc : request.docs) ids.push_back(doc.doc_id);
  std::lock_guard lock(mu_);
  docs_.push_back(std::move(ids));
  kinds_.push_back(request.kind);
}

OracleResponse RecordingOracle::ask(const OracleRequest& request) {
  log(request);
  return inner_.ask(request);
}

std::vector<OracleResponse> RecordingOracle::ask_batch(
    std::span<const OracleRequest> requests) {
  for (const auto& request : requests) log(request);
  return inner_.ask_batch(requests);
}

std::size_t RecordingOracle::count() const {
  std::lock_guard lock(mu_);
  return docs_.size();
}

std::vector<std::vector<std::string>> RecordingOracle::doc_sequences() const {
  std::lock_guard lock(mu_);
  return docs_;
}

std::vector<RequestKind> RecordingOracle::kinds() const {
  std::lock_guard lock(mu_);
  return kinds_;
}

}  // namespace setrank
