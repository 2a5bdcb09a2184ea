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
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "setrank/core.hpp"
#include "setrank/prompts.hpp"

namespace setrank {

enum class RequestKind {
  kScoreQueryLikelihood,
  kScoreYesNo,
  kSelectMostRelevant,
  kOrderWindow,
  kPreferPair,
};

std::string_view request_kind_name(RequestKind kind) noexcept;

/// One LLM interaction. `docs` are in presentation order; document i is
/// shown under label i.
struct OracleRequest {
  RequestKind kind = RequestKind::kSelectMostRelevant;
  Query query;
  std::vector<Document> docs;
  ScoringMode mode = ScoringMode::kGeneration;
  /// Per-document truncation applied when the request is rendered.
  int max_doc_tokens = 128;

  /// SelectMostRelevant 2..26 docs, OrderWindow 2..26, PreferPair 2,
  /// pointwise kinds 1. Throws ArityMismatch.
  void validate() const;
  /// Prompt method used to render this request.
  Method prompt_method() const noexcept;
};

namespace response {
struct Score {
  double value;
};
struct Selected {
  Label label;
};
/// Probability per offered label, in offered order.
struct LabelDistribution {
  std::vector<double> probabilities;
};
struct Ordered {
  std::vector<Label> labels;
};
struct Preferred {
  Label label;
};
struct Failure {
  std::string raw;
};
}  // namespace response

using ResponseValue =
    std::variant<response::Score, response::Selected,
                 response::LabelDistribution, response::Ordered,
                 response::Preferred, response::Failure>;

struct OracleResponse {
  ResponseValue value;
  Usage usage;

  bool failed() const noexcept {
    return std::holds_alternative<response::Failure>(value);
  }
};

struct Capabilities {
  bool logits = true;
  bool generate = true;
  bool query_likelihood = true;
};

/// Anything that answers ranking requests: an LLM endpoint or a mock.
/// Implementations must be callable concurrently from ask_batch workers.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual OracleResponse ask(const OracleRequest& request) = 0;
  /// Element-wise identical to calling ask() in order. The default runs
  /// sequentially; errors propagate from the first failing element.
  virtual std::vector<OracleResponse> ask_batch(
      std::span<const OracleRequest> requests);
  virtual Capabilities capabilities() const { return {}; }
};

/// Sends a request and books its cost.
OracleResponse consult(Oracle& oracle, const OracleRequest& request,
                       CostLedger& ledger);
std::vector<OracleResponse> consult_batch(Oracle& oracle,
                                          std::span<const OracleRequest> requests,
                                          CostLedger& ledger);

struct MockOracleSpec {
  std::unordered_map<std::string, double> true_score;
  double noise_p = 0.0;
  std::uint64_t rng_seed = 0;
};

/// Ground-truth oracle. With noise_p = 0 it is a total order over
/// true_score with ties broken by presentation position.
///
/// Noise: with probability noise_p a selection (SelectMostRelevant,
/// PreferPair) names a uniformly random non-argmax label; an ordering
/// swaps its head with a uniformly random other position; a score is
/// replaced by a uniform draw over the observed true-score range. Logits
/// responses inherit the (possibly noisy) choice. The noise stream is keyed
/// by request ordinal, so batches replay exactly.
///
/// Usage is the whitespace-token count of the rendered prompt and of the
/// answer text a model would produce (0 generated tokens for logits and
/// scoring requests).
class MockOracle final : public Oracle {
 public:
  explicit MockOracle(MockOracleSpec spec, Capabilities caps = {},
                      const PromptTemplates& templates = PromptTemplates::builtin());

  OracleResponse ask(const OracleRequest& request) override;
  std::vector<OracleResponse> ask_batch(
      std::span<const OracleRequest> requests) override;
  Capabilities capabilities() const override { return caps_; }

  double true_score(const std::string& doc_id) const;

 private:
  OracleResponse answer(const OracleRequest& request, std::uint64_t ordinal) const;
  Usage usage_for(const OracleRequest& request, std::string_view answer) const;

  MockOracleSpec spec_;
  Capabilities caps_;
  const PromptTemplates* templates_;
  double min_score_ = 0.0;
  double max_score_ = 0.0;
  std::atomic<std::uint64_t> next_ordinal_{0};
};

/// Pass-through wrapper that logs every request it forwards. Tests use it to
/// audit call counts and request sequences.
class RecordingOracle final : public Oracle {
 public:
  explicit RecordingOracle(Oracle& inner) : inner_(inner) {}

  OracleResponse ask(const OracleRequest& request) override;
  std::vector<OracleResponse> ask_batch(
      std::span<const OracleRequest> requests) override;
  Capabilities capabilities() const override { return inner_.capabilities(); }

  std::size_t count() const;
  /// Doc ids of each request, in issue order.
  std::vector<std::vector<std::string>> doc_sequences() const;
  std::vector<RequestKind> kinds() const;

 private:
  void log(const OracleRequest& request);

  Oracle& inner_;
  mutable std::mutex mu_;
  std::vector<std::vector<std::string>> docs_;
  std::vector<RequestKind> kinds_;
};

}  // namespace setrank
