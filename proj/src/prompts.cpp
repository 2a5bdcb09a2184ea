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

#include "setrank/prompts.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace setrank {

namespace detail {
// Generated at configure time from templates/v1/*.txt.
extern const char* const kBuiltinTemplates[5];
}  // namespace detail

namespace {

bool is_space(char ch) {
  return std::isspace(static_cast<unsigned char>(ch)) != 0;
}

bool is_alnum(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) != 0;
}

char upper(char ch) {
  return static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
}

constexpr std::array<std::string_view, 5> kSlots = {
    "query", "text", "passages", "num", "label_list"};

bool is_slot_name(std::string_view name) {
  return std::find(kSlots.begin(), kSlots.end(), name) != kSlots.end();
}

/// Newlines and tabs inside a passage would break the one-passage-per-line
/// layout.
std::string flatten(std::string text) {
  for (char& ch : text)
    if (ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
  return text;
}

int template_index(TemplateKind kind) { return static_cast<int>(kind); }

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> WhitespaceTokenizer::spans(
    std::string_view text) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    const std::size_t begin = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    out.emplace_back(begin, i);
  }
  return out;
}

std::size_t WhitespaceTokenizer::count(std::string_view text) const {
  std::size_t n = 0;
  bool in_token = false;
  for (char ch : text) {
    const bool space = is_space(ch);
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

const Tokenizer& default_tokenizer() {
  static const WhitespaceTokenizer tokenizer;
  return tokenizer;
}

std::string truncate(std::string_view text, int max_tokens,
                     const Tokenizer& tokenizer) {
  if (max_tokens < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  const auto spans = tokenizer.spans(text);
  if (spans.size() <= static_cast<std::size_t>(max_tokens))
    return std::string(text);
  return std::string(text.substr(0, spans[max_tokens - 1].second));
}

std::string_view template_file_name(TemplateKind kind) noexcept {
  switch (kind) {
    case TemplateKind::kPointwiseQlm: return "pointwise_qlm.txt";
    case TemplateKind::kPointwiseYesNo: return "pointwise_yes_no.txt";
    case TemplateKind::kListwise: return "listwise.txt";
    case TemplateKind::kPairwise: return "pairwise.txt";
    case TemplateKind::kSetwise: return "setwise.txt";
  }
  return "";
}

TemplateKind template_for(Method method) noexcept {
  switch (method) {
    case Method::kPointwiseQlm: return TemplateKind::kPointwiseQlm;
    case Method::kPointwiseYesNo: return TemplateKind::kPointwiseYesNo;
    case Method::kListwiseGeneration: return TemplateKind::kListwise;
    case Method::kPairwiseAllpair:
    case Method::kPairwiseHeapsort:
    case Method::kPairwiseBubblesort: return TemplateKind::kPairwise;
    case Method::kListwiseLikelihood:
    case Method::kSetwiseHeapsort:
    case Method::kSetwiseBubblesort: return TemplateKind::kSetwise;
  }
  return TemplateKind::kSetwise;
}

std::string PromptTemplates::normalize(std::string raw, std::string_view name) {
  while (!raw.empty() && (raw.back() == '\n' || raw.back() == '\r'))
    raw.pop_back();
  if (raw.empty())
    throw ParseError("template " + std::string(name) + " is empty");
  for (std::size_t pos = raw.find('{'); pos != std::string::npos;
       pos = raw.find('{', pos + 1)) {
    const auto close = raw.find('}', pos);
    if (close == std::string::npos) break;
    const std::string_view name_view(raw.data() + pos + 1, close - pos - 1);
    const bool identifier =
        !name_view.empty() &&
        std::all_of(name_view.begin(), name_view.end(),
                    [](char ch) { return std::islower(static_cast<unsigned char>(ch)) || ch == '_'; });
    if (identifier && !is_slot_name(name_view))
      throw ParseError("template " + std::string(name) + " uses unknown slot {" +
                       std::string(name_view) + "}");
  }
  return raw;
}

const PromptTemplates& PromptTemplates::builtin() {
  static const PromptTemplates templates = [] {
    PromptTemplates t;
    for (int i = 0; i < 5; ++i)
      t.texts_[i] = normalize(detail::kBuiltinTemplates[i],
                              template_file_name(static_cast<TemplateKind>(i)));
    return t;
  }();
  return templates;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  for (int i = 0; i < 5; ++i) {
    const auto name = template_file_name(static_cast<TemplateKind>(i));
    const auto path = dir / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    t.texts_[i] = normalize(buf.str(), name);
  }
  return t;
}

const std::string& PromptTemplates::text(TemplateKind kind) const {
  return texts_[template_index(kind)];
}

std::string PromptTemplates::render(TemplateKind kind, const Query& query,
                                    std::span<const Document> docs,
                                    int max_doc_tokens,
                                    const Tokenizer& tokenizer) const {
  std::string passages;
  std::string single_text;
  const bool pointwise = kind == TemplateKind::kPointwiseQlm ||
                         kind == TemplateKind::kPointwiseYesNo;
  if (pointwise) {
    if (docs.size() != 1)
      throw ArityMismatch("pointwise prompt takes exactly 1 document, got " +
                          std::to_string(docs.size()));
    single_text = flatten(truncate(docs[0].text, max_doc_tokens, tokenizer));
  } else {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (i) passages += '\n';
      passages += render_label(static_cast<int>(i));
      passages += ": \"";
      passages += flatten(truncate(docs[i].text, max_doc_tokens, tokenizer));
      passages += '"';
    }
  }

  const std::string& tpl = text(kind);
  std::string out;
  out.reserve(tpl.size() + passages.size() + single_text.size() + 64);
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      const auto close = tpl.find('}', i);
      if (close != std::string::npos) {
        const std::string_view name(tpl.data() + i + 1, close - i - 1);
        if (name == "query") {
          out += flatten(query.text);
        } else if (name == "text") {
          out += single_text;
        } else if (name == "passages") {
          out += passages;
        } else if (name == "num") {
          out += std::to_string(docs.size());
        } else if (name == "label_list") {
          out += label_list(docs.size());
        } else {
          out.append(tpl, i, close - i + 1);
        }
        i = close + 1;
        continue;
      }
    }
    out += tpl[i++];
  }
  return out;
}

void check_arity(Method method, std::size_t n, const RankerConfig& config) {
  std::size_t lo = 2;
  std::size_t hi = 2;
  if (is_pointwise(method)) {
    lo = hi = 1;
  } else if (is_pairwise(method)) {
    lo = hi = 2;
  } else if (method == Method::kListwiseGeneration ||
             method == Method::kListwiseLikelihood) {
    hi = static_cast<std::size_t>(config.w);
  } else {
    hi = static_cast<std::size_t>(config.effective_c());
  }
  if (n < lo || n > hi)
    throw ArityMismatch(std::string(method_name(method)) + " prompt takes " +
                        (lo == hi ? std::to_string(lo)
                                  : std::to_string(lo) + ".." + std::to_string(hi)) +
                        " documents, got " + std::to_string(n));
}

std::string render_prompt(Method method, const Query& query,
                          std::span<const Document> docs,
                          const RankerConfig& config, const Tokenizer& tokenizer,
                          const PromptTemplates& templates) {
  check_arity(method, docs.size(), config);
  return templates.render(template_for(method), query, docs,
                          config.resolved_max_doc_tokens(), tokenizer);
}

std::string qlm_continuation(const Query& query) { return flatten(query.text); }

std::vector<Label> offered_labels(std::size_t n) {
  std::vector<Label> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(Label{static_cast<int>(i)});
  return out;
}

std::string label_list(std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += label_letter(static_cast<int>(i));
  }
  return out;
}

namespace {

/// Letters mentioned as labels, in order of appearance. Recognised forms:
/// "Passage X" / "passage x", "[X]" / "[x]", and a bare uppercase letter
/// standing alone as a word.
std::vector<int> scan_labels(std::string_view raw) {
  constexpr std::string_view kWord = "passage";
  std::vector<int> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    const char ch = raw[i];
    const bool word_start = i == 0 || !is_alnum(raw[i - 1]);
    if (word_start && raw.size() - i >= kWord.size()) {
      bool match = true;
      for (std::size_t j = 0; j < kWord.size() && match; ++j)
        match = std::tolower(static_cast<unsigned char>(raw[i + j])) == kWord[j];
      if (match) {
        std::size_t j = i + kWord.size();
        while (j < raw.size() && (raw[j] == ' ' || raw[j] == '[')) ++j;
        if (j < raw.size() && std::isalpha(static_cast<unsigned char>(raw[j])) &&
            (j + 1 == raw.size() || !is_alnum(raw[j + 1]))) {
          out.push_back(upper(raw[j]) - 'A');
          i = j + 1;
          continue;
        }
      }
    }
    if (ch == '[' && i + 2 < raw.size() && raw[i + 2] == ']' &&
        std::isalpha(static_cast<unsigned char>(raw[i + 1]))) {
      out.push_back(upper(raw[i + 1]) - 'A');
      i += 3;
      continue;
    }
    if (ch >= 'A' && ch <= 'Z' && word_start &&
        (i + 1 == raw.size() || !is_alnum(raw[i + 1]))) {
      out.push_back(ch - 'A');
    }
    ++i;
  }
  return out;
}

bool is_offered(int index, std::span<const Label> offered) {
  return std::any_of(offered.begin(), offered.end(),
                     [index](Label l) { return l.index == index; });
}

std::string_view trim_answer(std::string_view raw) {
  auto strip = [](char ch) {
    return is_space(ch) || ch == '"' || ch == '\'' || ch == '.' || ch == ':' ||
           ch == '*' || ch == '[' || ch == ']' || ch == '(' || ch == ')';
  };
  while (!raw.empty() && strip(raw.front())) raw.remove_prefix(1);
  while (!raw.empty() && strip(raw.back())) raw.remove_suffix(1);
  return raw;
}

/// Whole answer is exactly one label, in any case ("b", "Passage B").
std::optional<int> whole_answer_label(std::string_view raw) {
  raw = trim_answer(raw);
  constexpr std::string_view kWord = "passage";
  if (raw.size() > kWord.size()) {
    bool match = true;
    for (std::size_t j = 0; j < kWord.size() && match; ++j)
      match = std::tolower(static_cast<unsigned char>(raw[j])) == kWord[j];
    if (match) {
      raw.remove_prefix(kWord.size());
      raw = trim_answer(raw);
    }
  }
  if (raw.size() == 1 && std::isalpha(static_cast<unsigned char>(raw[0])))
    return upper(raw[0]) - 'A';
  return std::nullopt;
}

ParsedOutput parse_selection(std::string_view raw,
                             std::span<const Label> offered) {
  if (auto whole = whole_answer_label(raw); whole && is_offered(*whole, offered))
    return parsed::SelectedLabel{Label{*whole}};
  for (int index : scan_labels(raw))
    if (is_offered(index, offered)) return parsed::SelectedLabel{Label{index}};
  return parsed::ParseFailure{std::string(raw)};
}

ParsedOutput parse_ordering(std::string_view raw,
                            std::span<const Label> offered) {
  std::vector<Label> order;
  order.reserve(offered.size());
  auto seen = [&order](int index) {
    return std::any_of(order.begin(), order.end(),
                       [index](Label l) { return l.index == index; });
  };
  for (int index : scan_labels(raw))
    if (is_offered(index, offered) && !seen(index)) order.push_back(Label{index});
  for (Label l : offered)
    if (!seen(l.index)) order.push_back(l);
  return parsed::OrderedLabels{std::move(order)};
}

ParsedOutput parse_yes_no(std::string_view raw) {
  std::size_t i = 0;
  while (i < raw.size() && !std::isalpha(static_cast<unsigned char>(raw[i]))) ++i;
  std::size_t j = i;
  while (j < raw.size() && std::isalpha(static_cast<unsigned char>(raw[j]))) ++j;
  std::string word;
  for (std::size_t p = i; p < j; ++p)
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[p])));
  if (word == "yes") return parsed::YesNo{true};
  if (word == "no") return parsed::YesNo{false};
  return parsed::ParseFailure{std::string(raw)};
}

}  // namespace

ParsedOutput parse_output(Method method, std::string_view raw,
                          std::span<const Label> offered) {
  if (offered.empty())
    throw Error(ErrorCode::kInvalidArgument, "parse_output needs offered labels");
  switch (method) {
    case Method::kPointwiseYesNo: return parse_yes_no(raw);
    case Method::kPointwiseQlm: return parsed::ParseFailure{std::string(raw)};
    case Method::kListwiseGeneration: return parse_ordering(raw, offered);
    default: return parse_selection(raw, offered);
  }
}

}  // namespace setrank
