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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "setrank/core.hpp"
#include "setrank/oracle.hpp"

namespace setrank {

std::string_view provenance_name(Provenance p) noexcept;
/// "asis", "inverted", "shuffled". Throws ConfigurationError.
Provenance parse_provenance(std::string_view name);

/// A synthetic query: N documents with hidden true scores, presented in the
/// order of a simulated first-stage retriever.
struct SyntheticInstance {
  CandidateList candidates;
  std::unordered_map<std::string, double> true_score;
  /// Doc ids by descending true score.
  std::vector<std::string> true_order;
};

/// true_score ~ N(0, 1); first-stage score = true_score + N(0, sigma^2);
/// candidates sorted by descending first-stage score. sigma = infinity
/// yields a uniformly random order.
SyntheticInstance make_instance(std::size_t n, std::uint64_t seed,
                                double first_stage_noise = 1.0);

/// The instance's candidates in the requested initial ordering.
CandidateList arrange(const SyntheticInstance& instance, Provenance init,
                      std::uint64_t seed);

struct SimulationConfig {
  std::vector<Method> methods{Method::kSetwiseHeapsort};
  std::size_t n = 100;
  int k = 10;
  std::vector<int> c_list{3};
  std::vector<double> noise{0.0};
  std::vector<Provenance> inits{Provenance::kAsIs};
  std::size_t seeds = 10;
  std::uint64_t base_seed = 0;
  int w = 4;
  int s = 2;
  int r = 5;
  double first_stage_noise = 1.0;
  ScoringMode scoring_mode = ScoringMode::kGeneration;
};

struct SimulationRecord {
  Method method = Method::kSetwiseHeapsort;
  std::size_t n = 0;
  int k = 0;
  /// Comparison set size; nullopt where the method has none.
  std::optional<int> c;
  double noise_p = 0.0;
  Provenance init = Provenance::kAsIs;
  std::uint64_t seed = 0;
  std::uint64_t inferences = 0;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t generated_tokens = 0;
  std::uint64_t parse_failures = 0;
  /// |top-k ∩ true top-k| / k.
  double recall = 0.0;
  /// First k ids equal the true top-k in order.
  bool exact_order = false;
};

struct SimulationSummary {
  Method method = Method::kSetwiseHeapsort;
  std::size_t n = 0;
  int k = 0;
  std::optional<int> c;
  double noise_p = 0.0;
  Provenance init = Provenance::kAsIs;
  std::size_t runs = 0;
  double mean_inferences = 0.0;
  double stddev_inferences = 0.0;
  double mean_prompt_tokens = 0.0;
  double mean_generated_tokens = 0.0;
  double mean_recall = 0.0;
  double stddev_recall = 0.0;
  double exact_fraction = 0.0;
};

/// One ranking of one instance under the mock oracle.
SimulationRecord simulate_one(const SyntheticInstance& instance, Method method,
                              int c, double noise_p, Provenance init,
                              std::uint64_t seed, const SimulationConfig& config);

/// Every method x c x noise x init x seed combination. Methods without a
/// set size run once regardless of c_list. `sink`, when given, receives each
/// record as soon as it is produced.
std::vector<SimulationRecord> simulate(
    const SimulationConfig& config,
    const std::function<void(const SimulationRecord&)>& sink = {});

std::vector<SimulationSummary> summarize(const std::vector<SimulationRecord>& records);

/// Single-line JSON objects.
std::string to_json_line(const SimulationRecord& record);
std::string to_json_line(const SimulationSummary& summary);

}  // namespace setrank
