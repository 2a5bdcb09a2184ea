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

#include <stdexcept>
#include <string>

namespace setrank {

enum class ErrorCode {
  kInvalidArgument = 1,
  kConfiguration,
  kCapabilityUnsupported,
  kLabelOverflow,
  kArityMismatch,
  kParse,
  kIo,
  kTransport,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what)
      : Error(ErrorCode::kConfiguration, what) {}
};

/// Raised when a request needs something the backend cannot provide,
/// e.g. label log-probabilities from a generation-only endpoint.
class CapabilityUnsupported : public Error {
 public:
  explicit CapabilityUnsupported(const std::string& what)
      : Error(ErrorCode::kCapabilityUnsupported, what) {}
};

class LabelOverflow : public Error {
 public:
  explicit LabelOverflow(const std::string& what)
      : Error(ErrorCode::kLabelOverflow, what) {}
};

class ArityMismatch : public Error {
 public:
  explicit ArityMismatch(const std::string& what)
      : Error(ErrorCode::kArityMismatch, what) {}
};

/// Malformed input file content. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(ErrorCode::kParse,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

/// Network failure or timeout that survived all retries.
class RetriableTransportError : public Error {
 public:
  explicit RetriableTransportError(const std::string& what)
      : Error(ErrorCode::kTransport, what) {}
};

}  // namespace setrank
