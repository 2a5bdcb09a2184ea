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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "setrank/core.hpp"

namespace setrank {

/// Splits text into tokens for truncation and cost accounting. Spans are
/// byte offsets [begin, end) into the input.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::pair<std::size_t, std::size_t>> spans(
      std::string_view text) const = 0;
  virtual std::size_t count(std::string_view text) const {
    return spans(text).size();
  }
};

class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::vector<std::pair<std::size_t, std::size_t>> spans(
      std::string_view text) const override;
  std::size_t count(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

/// Prefix of `text` holding at most `max_tokens` tokens, cut right after the
/// last kept token. Text within the budget is returned unchanged.
std::string truncate(std::string_view text, int max_tokens,
                     const Tokenizer& tokenizer = default_tokenizer());
inline std::string truncate(const Document& doc, int max_tokens,
                            const Tokenizer& tokenizer = default_tokenizer()) {
  return truncate(doc.text, max_tokens, tokenizer);
}

enum class TemplateKind {
  kPointwiseQlm,
  kPointwiseYesNo,
  kListwise,
  kPairwise,
  kSetwise,
};

std::string_view template_file_name(TemplateKind kind) noexcept;
/// listwise.likelihood asks the setwise question over the whole window.
TemplateKind template_for(Method method) noexcept;

/// One plain-text template per prompt shape. Slots: {query}, {text},
/// {passages}, {num}, {label_list}. Slots are substituted in a single pass,
/// so braces inside documents are never expanded.
class PromptTemplates {
 public:
  /// Templates compiled in from templates/v1.
  static const PromptTemplates& builtin();
  /// Reads <dir>/<kind>.txt for every kind. Throws IoError / ParseError.
  static PromptTemplates load(const std::filesystem::path& dir);

  const std::string& text(TemplateKind kind) const;
  std::string render(TemplateKind kind, const Query& query,
                     std::span<const Document> docs, int max_doc_tokens,
                     const Tokenizer& tokenizer) const;

  static constexpr std::string_view kVersion = "v1";

 private:
  PromptTemplates() = default;
  static std::string normalize(std::string raw, std::string_view name);

  std::string texts_[5];
};

/// Document count accepted by a method's prompt: pointwise 1, pairwise 2,
/// listwise 2..w, setwise 2..c. Throws ArityMismatch.
void check_arity(Method method, std::size_t n, const RankerConfig& config);

std::string render_prompt(Method method, const Query& query,
                          std::span<const Document> docs,
                          const RankerConfig& config,
                          const Tokenizer& tokenizer = default_tokenizer(),
                          const PromptTemplates& templates =
                              PromptTemplates::builtin());

/// The continuation scored by query-likelihood: the query text itself.
std::string qlm_continuation(const Query& query);

namespace parsed {
struct YesNo {
  bool yes;
};
struct SelectedLabel {
  Label label;
};
struct OrderedLabels {
  std::vector<Label> labels;
};
struct ParseFailure {
  std::string raw;
};
}  // namespace parsed

using ParsedOutput = std::variant<parsed::YesNo, parsed::SelectedLabel,
                                  parsed::OrderedLabels, parsed::ParseFailure>;

/// Defensive reading of raw model text.
///  - setwise / pairwise / listwise.likelihood: first offered label found.
///  - listwise.generation: every offered label in order of appearance;
///    repeats and unknown labels dropped, missing ones appended in offered
///    order. Never fails.
///  - pointwise.yes_no: leading "yes" / "no".
ParsedOutput parse_output(Method method, std::string_view raw,
                          std::span<const Label> offered);

/// Labels 0..n-1.
std::vector<Label> offered_labels(std::size_t n);

/// "A, B, C" for n = 3.
std::string label_list(std::size_t n);

}  // namespace setrank
