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

#include "sim_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace setrank::testing {

PromptShape sniff(std::string_view prompt) {
  if (prompt.find("Ranking:") != std::string_view::npos) return PromptShape::kListwise;
  if (prompt.find("Answer 'Yes' or 'No'") != std::string_view::npos) return PromptShape::kYesNo;
  if (prompt.find("write a question") != std::string_view::npos)
    return PromptShape::kQueryLikelihood;
  if (prompt.find("Passage A: \"") != std::string_view::npos) return PromptShape::kSelection;
  return PromptShape::kUnknown;
}

std::vector<std::string> labelled_passages(std::string_view prompt) {
  std::vector<std::string> out;
  for (char letter = 'A'; letter <= 'Z'; ++letter) {
    const std::string marker = std::string("Passage ") + letter + ": \"";
    const auto at = prompt.find(marker);
    if (at == std::string_view::npos) break;
    const auto begin = at + marker.size();
    const auto end = prompt.find('\n', begin);
    std::string_view line = prompt.substr(begin, end == std::string_view::npos ? end : end - begin);
    if (!line.empty() && line.back() == '"') line.remove_suffix(1);
    out.emplace_back(line);
  }
  return out;
}

std::string pointwise_passage(std::string_view prompt) {
  constexpr std::string_view kPrefix = "Passage: ";
  const auto at = prompt.find(kPrefix);
  if (at == std::string_view::npos) return {};
  const auto begin = at + kPrefix.size();
  const auto end = prompt.find('\n', begin);
  return std::string(prompt.substr(begin, end == std::string_view::npos ? end : end - begin));
}

double SimulatedTextModel::score(const std::string& text) const {
  const auto it = scores_.find(text);
  return it == scores_.end() ? 0.0 : it->second;
}

ChatResult SimulatedTextModel::chat(const std::string& prompt, int, bool want_logprobs) {
  const auto call = calls_.fetch_add(1) + 1;
  ChatResult out;
  const PromptShape shape = sniff(prompt);
  std::vector<std::pair<std::string, double>> top;

  if (shape == PromptShape::kYesNo) {
    const double s = score(pointwise_passage(prompt));
    const double p_yes = 1.0 / (1.0 + std::exp(-s));
    out.text = p_yes >= 0.5 ? "Yes" : "No";
    top = {{"Yes", std::log(p_yes)}, {"No", std::log1p(-p_yes)}};
  } else {
    const auto passages = labelled_passages(prompt);
    std::vector<double> s;
    for (const auto& p : passages) s.push_back(score(p));
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    if (shape == PromptShape::kListwise) {
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (i) out.text += " > ";
        out.text += static_cast<char>('A' + order[i]);
      }
    } else if (!order.empty()) {
      out.text = std::string(1, static_cast<char>('A' + order.front()));
    }
    // Softmax over passage scores, sharpened so the argmax dominates.
    if (!s.empty()) {
      const double hi = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (double v : s) z += std::exp(4.0 * (v - hi));
      for (std::size_t i = 0; i < s.size(); ++i)
        top.emplace_back(std::string(1, static_cast<char>('A' + i)),
                         4.0 * (s[i] - hi) - std::log(z));
    }
  }

  if (malformed_every && call % malformed_every == 0) {
    out.text = "unable to determine which one is more relevant.";
    top = {{"unable", -0.1}, {"The", -2.5}};
    malformed_.fetch_add(1);
  }
  if (emit_logprobs && want_logprobs) out.first_token_logprobs = std::move(top);
  if (emit_usage) {
    Usage u{default_tokenizer().count(prompt) + usage_offset, default_tokenizer().count(out.text)};
    reported_prompt_.fetch_add(u.prompt_tokens);
    reported_generated_.fetch_add(u.generated_tokens);
    out.usage = u;
  }
  return out;
}

ContinuationScore SimulatedTextModel::score_continuation(const std::string& prompt,
                                                         const std::string& continuation) {
  calls_.fetch_add(1);
  const double s = score(pointwise_passage(prompt));
  ContinuationScore out;
  out.token_logprobs.assign(std::max<std::size_t>(default_tokenizer().count(continuation), 1),
                            s);
  if (emit_usage) {
    Usage u{default_tokenizer().count(prompt) + default_tokenizer().count(continuation) +
                usage_offset,
            0};
    reported_prompt_.fetch_add(u.prompt_tokens);
    out.usage = u;
  }
  return out;
}

std::unordered_map<std::string, double> scores_by_text(const SyntheticInstance& instance) {
  std::unordered_map<std::string, double> out;
  for (const auto& doc : instance.candidates.items())
    out[doc.text] = instance.true_score.at(doc.doc_id);
  return out;
}

}  // namespace setrank::testing
