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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "setrank/llm_client.hpp"

namespace httplib {
class Server;
}

namespace setrank::testing {

/// Local HTTP server speaking the chat-completions and completions wire
/// format, answering from a TextModel.
class StubServer {
 public:
  struct Options {
    /// Include logprobs in chat replies when the request asks for them.
    bool chat_logprobs = true;
    /// Serve /v1/completions; otherwise it 404s.
    bool completions_route = true;
    /// The first `fail_first` requests answer with `fail_status`.
    int fail_first = 0;
    int fail_status = 500;
    /// Canned logprobs for the continuation tokens of a completions call.
    std::optional<std::vector<double>> continuation_logprobs;
    /// Reported prompt tokens are the whitespace count plus this.
    std::uint64_t usage_offset = 7;
    /// Required bearer token; empty accepts anything.
    std::string api_key;
  };

  StubServer(TextModel& model, Options options);
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  std::string base_url() const;
  int port() const noexcept { return port_; }

  std::uint64_t requests() const noexcept { return requests_.load(); }
  std::uint64_t reported_prompt_tokens() const noexcept { return prompt_tokens_.load(); }
  std::uint64_t reported_completion_tokens() const noexcept { return completion_tokens_.load(); }
  /// Raw request bodies in arrival order.
  std::vector<std::string> bodies() const;

 private:
  TextModel& model_;
  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> prompt_tokens_{0};
  std::atomic<std::uint64_t> completion_tokens_{0};
  mutable std::mutex mu_;
  std::vector<std::string> bodies_;
};

}  // namespace setrank::testing
