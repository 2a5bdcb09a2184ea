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
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "setrank/core.hpp"
#include "setrank/oracle.hpp"
#include "setrank/prompts.hpp"

namespace setrank {

struct EndpointConfig {
  /// scheme://host[:port][/prefix]; "/v1/chat/completions" is appended
  /// (a trailing "/v1" in the prefix is not repeated).
  std::string base_url = "http://127.0.0.1:8000";
  std::string model;
  /// Bearer token; empty sends no Authorization header.
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  /// Ranking is deterministic; anything else is rejected by validate().
  double temperature = 0.0;
  /// Ask for first-token logprobs on generation requests too (diagnostics).
  bool logprobs_requested = false;
  int top_logprobs = 20;
  /// Declared capabilities, checked before ranking starts. Missing logprobs
  /// in a response still raise CapabilityUnsupported at call time.
  bool supports_logprobs = true;
  bool supports_completions = true;
  std::size_t max_parallel = 8;

  void validate() const;
  /// SETRANK_API_KEY, else OPENAI_API_KEY, else empty.
  static std::string api_key_from_env();
};

struct ChatResult {
  std::string text;
  /// Top alternatives for the first generated token; nullopt when the
  /// server returned no logprobs.
  std::optional<std::vector<std::pair<std::string, double>>> first_token_logprobs;
  std::optional<Usage> usage;
};

struct ContinuationScore {
  std::vector<double> token_logprobs;
  std::optional<Usage> usage;
};

/// Text-in, text-out model. Implementations must allow concurrent calls.
class TextModel {
 public:
  virtual ~TextModel() = default;
  virtual ChatResult chat(const std::string& prompt, int max_tokens,
                          bool want_logprobs) = 0;
  /// Log-probabilities of the `continuation` tokens given `prompt`.
  virtual ContinuationScore score_continuation(const std::string& prompt,
                                               const std::string& continuation) = 0;
};

/// Thin OpenAI-compatible HTTP client with retry. Safe for concurrent use:
/// each call opens its own connection.
class LlmClient final : public TextModel {
 public:
  explicit LlmClient(EndpointConfig config);

  ChatResult chat(const std::string& prompt, int max_tokens, bool want_logprobs) override;
  /// Via /v1/completions with echo. CapabilityUnsupported when the endpoint
  /// has no completions route or omits logprobs.
  ContinuationScore score_continuation(const std::string& prompt,
                                       const std::string& continuation) override;

  const EndpointConfig& config() const noexcept { return config_; }
  /// Attempts that failed and were retried, across all calls.
  std::uint64_t retries() const noexcept { return retries_.load(); }

 private:
  /// POSTs a JSON body with retry; returns the response body.
  std::string post(const std::string& route, const std::string& body);

  EndpointConfig config_;
  std::string origin_;
  std::string prefix_;
  std::atomic<std::uint64_t> retries_{0};
};

/// Oracle that renders each request into a prompt, sends it to a text model
/// (normally an OpenAI-compatible endpoint) and parses the reply.
///
/// Generation mode parses the text. Logits mode reads the first token's
/// top log-probabilities, keeps the mass on each offered label letter and
/// renormalises over the offered labels. Yes/no scoring returns
/// P(yes) / (P(yes) + P(no)) from the same first-token distribution.
class LlmOracle final : public Oracle {
 public:
  explicit LlmOracle(EndpointConfig config,
                     const Tokenizer& tokenizer = default_tokenizer(),
                     const PromptTemplates& templates = PromptTemplates::builtin());
  /// Borrows `model`, which must outlive the oracle.
  LlmOracle(TextModel& model, Capabilities caps, std::size_t max_parallel = 1,
            const Tokenizer& tokenizer = default_tokenizer(),
            const PromptTemplates& templates = PromptTemplates::builtin());

  OracleResponse ask(const OracleRequest& request) override;
  /// Runs up to max_parallel requests at once.
  std::vector<OracleResponse> ask_batch(
      std::span<const OracleRequest> requests) override;
  Capabilities capabilities() const override;

  /// Mean log-probability of the query tokens under the qlm prompt.
  double score_query_likelihood(const Query& query, const Document& doc,
                                int max_doc_tokens);

  /// The HTTP client; nullptr when built over a borrowed TextModel.
  LlmClient* client() noexcept { return owned_.get(); }

 private:
  Usage usage_or_count(const std::optional<Usage>& reported,
                       std::string_view prompt, std::string_view output) const;

  std::unique_ptr<LlmClient> owned_;
  TextModel* model_;
  Capabilities caps_;
  std::size_t max_parallel_;
  bool logprobs_requested_ = false;
  const Tokenizer* tokenizer_;
  const PromptTemplates* templates_;
};

/// Probability mass per offered label from first-token alternatives
/// ("B", " B", "[B" all count for B), renormalised. Empty when none of the
/// alternatives names an offered label.
std::vector<double> label_distribution(
    const std::vector<std::pair<std::string, double>>& top_logprobs,
    std::size_t offered);

/// P(yes) / (P(yes) + P(no)); nullopt when neither appears.
std::optional<double> yes_probability(
    const std::vector<std::pair<std::string, double>>& top_logprobs);

}  // namespace setrank
