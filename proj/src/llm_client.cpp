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

#include "setrank/llm_client.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace setrank {

using nlohmann::json;

namespace {

std::string trim_token(std::string_view token) {
  auto junk = [](char ch) {
    return std::isspace(static_cast<unsigned char>(ch)) || ch == '[' || ch == ']' ||
           ch == '(' || ch == ')' || ch == '"' || ch == '\'' || ch == '.' ||
           ch == ':' || ch == '*' || ch == ',';
  };
  while (!token.empty() && junk(token.front())) token.remove_prefix(1);
  while (!token.empty() && junk(token.back())) token.remove_suffix(1);
  // SentencePiece / GPT-2 style word-boundary markers.
  for (std::string_view marker : {"\xE2\x96\x81", "\xC4\xA0"})
    if (token.substr(0, marker.size()) == marker) token.remove_prefix(marker.size());
  return std::string(token);
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::optional<Usage> read_usage(const json& body) {
  const auto it = body.find("usage");
  if (it == body.end() || !it->is_object()) return std::nullopt;
  Usage usage;
  usage.prompt_tokens = it->value("prompt_tokens", std::uint64_t{0});
  usage.generated_tokens = it->value("completion_tokens", std::uint64_t{0});
  return usage;
}

json parse_body(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw RetriableTransportError(std::string("malformed JSON from endpoint: ") + e.what());
  }
}

/// First choice of a chat/completions response.
const json& first_choice(const json& body) {
  const auto it = body.find("choices");
  if (it == body.end() || !it->is_array() || it->empty())
    throw RetriableTransportError("endpoint response has no choices");
  return it->front();
}

std::optional<std::vector<std::pair<std::string, double>>> read_first_token_logprobs(
    const json& choice) {
  const auto lp = choice.find("logprobs");
  if (lp == choice.end() || !lp->is_object()) return std::nullopt;
  std::vector<std::pair<std::string, double>> out;
  // Chat format: logprobs.content[0].top_logprobs = [{token, logprob}, ...]
  if (const auto content = lp->find("content");
      content != lp->end() && content->is_array() && !content->empty()) {
    const json& first = content->front();
    if (const auto top = first.find("top_logprobs"); top != first.end() && top->is_array())
      for (const auto& alt : *top)
        if (alt.contains("token") && alt.contains("logprob") && alt["logprob"].is_number())
          out.emplace_back(alt["token"].get<std::string>(), alt["logprob"].get<double>());
    if (out.empty() && first.contains("token") && first.contains("logprob") &&
        first["logprob"].is_number())
      out.emplace_back(first["token"].get<std::string>(), first["logprob"].get<double>());
    return out;
  }
  // Legacy completions format: logprobs.top_logprobs[0] = {token: logprob}
  if (const auto top = lp->find("top_logprobs");
      top != lp->end() && top->is_array() && !top->empty() && top->front().is_object()) {
    for (const auto& [token, value] : top->front().items())
      if (value.is_number()) out.emplace_back(token, value.get<double>());
    return out;
  }
  return std::nullopt;
}

}  // namespace

void EndpointConfig::validate() const {
  if (base_url.find("://") == std::string::npos)
    throw ConfigurationError("endpoint base URL needs a scheme: " + base_url);
  if (temperature != 0.0)
    throw ConfigurationError("ranking calls require temperature 0");
  if (max_retries < 0) throw ConfigurationError("max_retries must be >= 0");
  if (top_logprobs < 1) throw ConfigurationError("top_logprobs must be >= 1");
  if (max_parallel < 1) throw ConfigurationError("max_parallel must be >= 1");
}

std::string EndpointConfig::api_key_from_env() {
  for (const char* name : {"SETRANK_API_KEY", "OPENAI_API_KEY"})
    if (const char* value = std::getenv(name); value && *value) return value;
  return {};
}

LlmClient::LlmClient(EndpointConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto scheme_end = config_.base_url.find("://") + 3;
  const auto path_start = config_.base_url.find('/', scheme_end);
  origin_ = config_.base_url.substr(0, path_start);
  prefix_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (prefix_.size() < 3 || prefix_.compare(prefix_.size() - 3, 3, "/v1") != 0)
    prefix_ += "/v1";
}

std::string LlmClient::post(const std::string& route, const std::string& body) {
  const std::string path = prefix_ + "/" + route;
  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  for (int attempt = 0;; ++attempt) {
    std::string failure;
    {
      httplib::Client cli(origin_);
      const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout);
      cli.set_connection_timeout(timeout);
      cli.set_read_timeout(timeout);
      cli.set_write_timeout(timeout);
      auto res = cli.Post(path, headers, body, "application/json");
      if (!res) {
        failure = "transport error: " + httplib::to_string(res.error());
      } else if (res->status >= 200 && res->status < 300) {
        return res->body;
      } else if (res->status == 429 || res->status >= 500) {
        failure = "HTTP " + std::to_string(res->status);
      } else if (res->status == 404 && route == "completions") {
        throw CapabilityUnsupported("endpoint has no " + path +
                                    " route; query-likelihood scoring needs it");
      } else {
        throw ConfigurationError("HTTP " + std::to_string(res->status) + " from " +
                                 path + ": " + res->body.substr(0, 300));
      }
    }
    if (attempt >= config_.max_retries)
      throw RetriableTransportError(failure + " after " + std::to_string(attempt + 1) +
                                    " attempts to " + origin_ + path);
    retries_.fetch_add(1, std::memory_order_relaxed);
    std::this_thread::sleep_for(config_.initial_backoff * (1LL << std::min(attempt, 16)));
  }
}

ChatResult LlmClient::chat(const std::string& prompt, int max_tokens, bool want_logprobs) {
  json request = {
      {"model", config_.model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config_.temperature},
      {"max_tokens", max_tokens},
  };
  if (want_logprobs) {
    request["logprobs"] = true;
    request["top_logprobs"] = config_.top_logprobs;
  }
  const json body = parse_body(post("chat/completions", request.dump()));
  const json& choice = first_choice(body);
  ChatResult out;
  if (const auto msg = choice.find("message"); msg != choice.end() && msg->is_object()) {
    if (const auto content = msg->find("content");
        content != msg->end() && content->is_string())
      out.text = content->get<std::string>();
  } else if (const auto text = choice.find("text"); text != choice.end() && text->is_string()) {
    out.text = text->get<std::string>();
  }
  out.first_token_logprobs = read_first_token_logprobs(choice);
  out.usage = read_usage(body);
  return out;
}

ContinuationScore LlmClient::score_continuation(const std::string& prompt,
                                                const std::string& continuation) {
  const std::string full = prompt + "\n" + continuation;
  const std::size_t boundary = prompt.size() + 1;
  json request = {
      {"model", config_.model}, {"prompt", full},        {"max_tokens", 0},
      {"echo", true},           {"logprobs", 1},         {"temperature", config_.temperature},
  };
  const json body = parse_body(post("completions", request.dump()));
  const json& choice = first_choice(body);
  const auto lp = choice.find("logprobs");
  if (lp == choice.end() || !lp->is_object() || !lp->contains("token_logprobs") ||
      !lp->contains("text_offset") || !lp->contains("tokens"))
    throw CapabilityUnsupported("completions endpoint returned no echoed token logprobs");
  const json& tokens = (*lp)["tokens"];
  const json& logprobs = (*lp)["token_logprobs"];
  const json& offsets = (*lp)["text_offset"];
  ContinuationScore out;
  const std::size_t n = std::min({tokens.size(), logprobs.size(), offsets.size()});
  for (std::size_t i = 0; i < n; ++i) {
    if (!logprobs[i].is_number() || !offsets[i].is_number()) continue;
    const auto begin = offsets[i].get<std::size_t>();
    const std::size_t end = begin + (tokens[i].is_string() ? tokens[i].get<std::string>().size() : 0);
    if (end > boundary) out.token_logprobs.push_back(logprobs[i].get<double>());
  }
  out.usage = read_usage(body);
  return out;
}

std::vector<double> label_distribution(
    const std::vector<std::pair<std::string, double>>& top_logprobs,
    std::size_t offered) {
  std::vector<double> mass(offered, 0.0);
  double total = 0.0;
  for (const auto& [token, logprob] : top_logprobs) {
    std::string t = trim_token(token);
    if (t.size() > 8 && lower(t.substr(0, 7)) == "passage") t = trim_token(t.substr(7));
    if (t.size() != 1 || !std::isalpha(static_cast<unsigned char>(t[0]))) continue;
    const int index = std::toupper(static_cast<unsigned char>(t[0])) - 'A';
    if (index < 0 || static_cast<std::size_t>(index) >= offered) continue;
    const double p = std::exp(logprob);
    mass[index] += p;
    total += p;
  }
  if (total <= 0.0) return {};
  for (double& m : mass) m /= total;
  return mass;
}

std::optional<double> yes_probability(
    const std::vector<std::pair<std::string, double>>& top_logprobs) {
  double yes = 0.0;
  double no = 0.0;
  for (const auto& [token, logprob] : top_logprobs) {
    const std::string t = lower(trim_token(token));
    if (t == "yes") yes += std::exp(logprob);
    else if (t == "no") no += std::exp(logprob);
  }
  if (yes + no <= 0.0) return std::nullopt;
  return yes / (yes + no);
}

LlmOracle::LlmOracle(EndpointConfig config, const Tokenizer& tokenizer,
                     const PromptTemplates& templates)
    : owned_(std::make_unique<LlmClient>(std::move(config))),
      model_(owned_.get()),
      max_parallel_(owned_->config().max_parallel),
      logprobs_requested_(owned_->config().logprobs_requested),
      tokenizer_(&tokenizer),
      templates_(&templates) {
  caps_.logits = owned_->config().supports_logprobs;
  caps_.generate = true;
  caps_.query_likelihood = owned_->config().supports_completions;
}

LlmOracle::LlmOracle(TextModel& model, Capabilities caps, std::size_t max_parallel,
                     const Tokenizer& tokenizer, const PromptTemplates& templates)
    : model_(&model),
      caps_(caps),
      max_parallel_(std::max<std::size_t>(max_parallel, 1)),
      tokenizer_(&tokenizer),
      templates_(&templates) {}

Capabilities LlmOracle::capabilities() const { return caps_; }

Usage LlmOracle::usage_or_count(const std::optional<Usage>& reported,
                                std::string_view prompt, std::string_view output) const {
  if (reported) return *reported;
  return Usage{tokenizer_->count(prompt), tokenizer_->count(output)};
}

double LlmOracle::score_query_likelihood(const Query& query, const Document& doc,
                                         int max_doc_tokens) {
  OracleRequest request;
  request.kind = RequestKind::kScoreQueryLikelihood;
  request.query = query;
  request.docs = {doc};
  request.mode = ScoringMode::kLogits;
  request.max_doc_tokens = max_doc_tokens;
  const OracleResponse response = ask(request);
  if (const auto* score = std::get_if<response::Score>(&response.value)) return score->value;
  throw CapabilityUnsupported("endpoint returned no continuation logprobs");
}

OracleResponse LlmOracle::ask(const OracleRequest& request) {
  request.validate();
  const Method method = request.prompt_method();
  const std::string prompt = templates_->render(template_for(method), request.query,
                                                request.docs, request.max_doc_tokens,
                                                *tokenizer_);
  const std::size_t n = request.docs.size();

  if (request.kind == RequestKind::kScoreQueryLikelihood) {
    if (!caps_.query_likelihood)
      throw CapabilityUnsupported("endpoint declared without completions scoring");
    const std::string continuation = qlm_continuation(request.query);
    const ContinuationScore scored = model_->score_continuation(prompt, continuation);
    const Usage usage = scored.usage ? *scored.usage
                                     : Usage{tokenizer_->count(prompt) +
                                                 tokenizer_->count(continuation),
                                             0};
    if (scored.token_logprobs.empty()) return {response::Failure{""}, usage};
    double sum = 0.0;
    for (double lp : scored.token_logprobs) sum += lp;
    return {response::Score{sum / static_cast<double>(scored.token_logprobs.size())}, usage};
  }

  const bool logits = request.kind == RequestKind::kScoreYesNo ||
                      (request.mode == ScoringMode::kLogits &&
                       request.kind != RequestKind::kPreferPair);
  if (logits && !caps_.logits)
    throw CapabilityUnsupported("endpoint declared without logprobs");
  const int max_tokens =
      logits ? 1 : (request.kind == RequestKind::kOrderWindow ? static_cast<int>(4 * n + 8) : 8);
  const ChatResult result =
      model_->chat(prompt, max_tokens, logits || logprobs_requested_);
  const Usage usage = usage_or_count(result.usage, prompt, result.text);

  if (logits) {
    if (!result.first_token_logprobs)
      throw CapabilityUnsupported(std::string(request_kind_name(request.kind)) +
                                  " in logits mode needs token logprobs, endpoint returned none");
    if (request.kind == RequestKind::kScoreYesNo) {
      const auto p = yes_probability(*result.first_token_logprobs);
      if (!p) return {response::Failure{result.text}, usage};
      return {response::Score{*p}, usage};
    }
    auto dist = label_distribution(*result.first_token_logprobs, n);
    if (dist.empty()) return {response::Failure{result.text}, usage};
    return {response::LabelDistribution{std::move(dist)}, usage};
  }

  const auto offered = offered_labels(n);
  const ParsedOutput parsed = parse_output(method, result.text, offered);
  if (const auto* sel = std::get_if<parsed::SelectedLabel>(&parsed)) {
    if (request.kind == RequestKind::kPreferPair)
      return {response::Preferred{sel->label}, usage};
    return {response::Selected{sel->label}, usage};
  }
  if (const auto* ord = std::get_if<parsed::OrderedLabels>(&parsed)) {
    // A reply naming no offered label at all back-fills to the input order;
    // report it as a failure so the ledger counts it.
    const auto any = parse_output(Method::kSetwiseHeapsort, result.text, offered);
    if (std::holds_alternative<parsed::ParseFailure>(any))
      return {response::Failure{result.text}, usage};
    return {response::Ordered{ord->labels}, usage};
  }
  return {response::Failure{result.text}, usage};
}

std::vector<OracleResponse> LlmOracle::ask_batch(std::span<const OracleRequest> requests) {
  const std::size_t n = requests.size();
  std::vector<std::optional<OracleResponse>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        results[i] = ask(requests[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(max_parallel_, n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  std::vector<OracleResponse> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

}  // namespace setrank
