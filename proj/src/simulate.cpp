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

#include "setrank/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include <json.hpp>

#include "random.hpp"
#include "setrank/rankers.hpp"

namespace setrank {

std::string_view provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::kAsIs: return "asis";
    case Provenance::kInverted: return "inverted";
    case Provenance::kShuffled: return "shuffled";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "asis") return Provenance::kAsIs;
  if (name == "inverted") return Provenance::kInverted;
  if (name == "shuffled") return Provenance::kShuffled;
  throw ConfigurationError("unknown initial ordering '" + std::string(name) +
                           "' (expected asis, inverted or shuffled)");
}

SyntheticInstance make_instance(std::size_t n, std::uint64_t seed,
                                double first_stage_noise) {
  if (n == 0) throw ConfigurationError("instance size must be >= 1");
  std::mt19937_64 rng(detail::mix_seed(seed, 0x1457));
  std::vector<Document> docs;
  std::vector<double> truth(n);
  std::vector<double> first_stage(n);
  docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "d" + std::to_string(i);
    truth[i] = detail::standard_normal(rng);
    first_stage[i] = std::isinf(first_stage_noise)
                         ? detail::uniform_unit(rng)
                         : truth[i] + first_stage_noise * detail::standard_normal(rng);
    docs.push_back(Document{id, "synthetic passage " + id + " for query q" +
                                    std::to_string(seed)});
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return first_stage[a] > first_stage[b];
  });
  std::vector<Document> presented;
  presented.reserve(n);
  for (std::size_t i : order) presented.push_back(docs[i]);

  std::vector<std::size_t> by_truth(n);
  std::iota(by_truth.begin(), by_truth.end(), 0);
  std::stable_sort(by_truth.begin(), by_truth.end(),
                   [&](std::size_t a, std::size_t b) { return truth[a] > truth[b]; });

  SyntheticInstance instance{
      CandidateList(Query{"q" + std::to_string(seed), "synthetic query " + std::to_string(seed)},
                    std::move(presented)),
      {},
      {}};
  for (std::size_t i = 0; i < n; ++i) instance.true_score[docs[i].doc_id] = truth[i];
  for (std::size_t i : by_truth) instance.true_order.push_back(docs[i].doc_id);
  return instance;
}

CandidateList arrange(const SyntheticInstance& instance, Provenance init,
                      std::uint64_t seed) {
  switch (init) {
    case Provenance::kAsIs: return instance.candidates;
    case Provenance::kInverted: return instance.candidates.inverted();
    case Provenance::kShuffled: return instance.candidates.shuffled(seed);
  }
  return instance.candidates;
}

namespace {

bool uses_set_size(Method m) {
  return m == Method::kSetwiseHeapsort || m == Method::kSetwiseBubblesort ||
         is_pairwise(m);
}

}  // namespace

SimulationRecord simulate_one(const SyntheticInstance& instance, Method method,
                              int c, double noise_p, Provenance init,
                              std::uint64_t seed, const SimulationConfig& config) {
  RankerConfig rc;
  rc.method = method;
  rc.k = config.k;
  rc.c = c;
  rc.w = config.w;
  rc.s = config.s;
  rc.r = config.r;
  rc.scoring_mode = config.scoring_mode;

  MockOracleSpec spec;
  spec.true_score = instance.true_score;
  spec.noise_p = noise_p;
  spec.rng_seed = detail::mix_seed(seed, 0x0a11ce);
  MockOracle oracle(std::move(spec));

  const CandidateList candidates = arrange(instance, init, seed);
  const RankResult result = rank(candidates, oracle, rc);

  SimulationRecord record;
  record.method = method;
  record.n = candidates.size();
  record.k = config.k;
  if (uses_set_size(method)) record.c = rc.effective_c();
  record.noise_p = noise_p;
  record.init = init;
  record.seed = seed;
  record.inferences = result.cost.num_inferences;
  record.prompt_tokens = result.cost.prompt_tokens;
  record.generated_tokens = result.cost.generated_tokens;
  record.parse_failures = result.cost.parse_failures;

  const std::size_t k = static_cast<std::size_t>(config.k);
  std::size_t hits = 0;
  bool exact = true;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& id = result.doc_ids[i];
    if (std::find(instance.true_order.begin(), instance.true_order.begin() + k, id) !=
        instance.true_order.begin() + k)
      ++hits;
    exact = exact && id == instance.true_order[i];
  }
  record.recall = static_cast<double>(hits) / static_cast<double>(k);
  record.exact_order = exact;
  return record;
}

std::vector<SimulationRecord> simulate(
    const SimulationConfig& config,
    const std::function<void(const SimulationRecord&)>& sink) {
  if (config.n == 0) throw ConfigurationError("--n must be >= 1");
  if (config.k < 1 || static_cast<std::size_t>(config.k) > config.n)
    throw ConfigurationError("k must satisfy 1 <= k <= N");
  if (config.c_list.empty()) throw ConfigurationError("c list is empty");
  for (double p : config.noise)
    if (p < 0.0 || p > 1.0) throw ConfigurationError("noise must lie in [0, 1]");

  std::vector<SimulationRecord> records;
  for (std::size_t s = 0; s < config.seeds; ++s) {
    const std::uint64_t seed = config.base_seed + s;
    const SyntheticInstance instance = make_instance(config.n, seed, config.first_stage_noise);
    for (Method method : config.methods) {
      std::vector<int> cs = config.c_list;
      if (is_pairwise(method)) cs = {2};
      else if (!uses_set_size(method)) cs = {config.c_list.front()};
      for (int c : cs)
        for (double noise : config.noise)
          for (Provenance init : config.inits) {
            records.push_back(simulate_one(instance, method, c, noise, init, seed, config));
            if (sink) sink(records.back());
          }
    }
  }
  return records;
}

std::vector<SimulationSummary> summarize(const std::vector<SimulationRecord>& records) {
  using Key = std::tuple<int, std::size_t, int, int, double, int>;
  std::map<Key, std::vector<const SimulationRecord*>> groups;
  std::vector<Key> order;
  for (const auto& r : records) {
    const Key key{static_cast<int>(r.method), r.n, r.k, r.c.value_or(0), r.noise_p,
                  static_cast<int>(r.init)};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  auto mean_sd = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
  };

  std::vector<SimulationSummary> out;
  for (const auto& key : order) {
    const auto& group = groups[key];
    const SimulationRecord& first = *group.front();
    SimulationSummary s;
    s.method = first.method;
    s.n = first.n;
    s.k = first.k;
    s.c = first.c;
    s.noise_p = first.noise_p;
    s.init = first.init;
    s.runs = group.size();
    std::vector<double> inf, prompt, gen, recall;
    std::size_t exact = 0;
    for (const auto* r : group) {
      inf.push_back(static_cast<double>(r->inferences));
      prompt.push_back(static_cast<double>(r->prompt_tokens));
      gen.push_back(static_cast<double>(r->generated_tokens));
      recall.push_back(r->recall);
      exact += r->exact_order ? 1 : 0;
    }
    std::tie(s.mean_inferences, s.stddev_inferences) = mean_sd(inf);
    s.mean_prompt_tokens = mean_sd(prompt).first;
    s.mean_generated_tokens = mean_sd(gen).first;
    std::tie(s.mean_recall, s.stddev_recall) = mean_sd(recall);
    s.exact_fraction = static_cast<double>(exact) / static_cast<double>(group.size());
    out.push_back(s);
  }
  return out;
}

std::string to_json_line(const SimulationRecord& r) {
  nlohmann::ordered_json j;
  j["type"] = "record";
  j["method"] = method_name(r.method);
  j["n"] = r.n;
  j["k"] = r.k;
  j["c"] = r.c ? nlohmann::ordered_json(*r.c) : nlohmann::ordered_json(nullptr);
  j["noise_p"] = r.noise_p;
  j["init"] = provenance_name(r.init);
  j["seed"] = r.seed;
  j["inferences"] = r.inferences;
  j["prompt_tokens"] = r.prompt_tokens;
  j["generated_tokens"] = r.generated_tokens;
  j["parse_failures"] = r.parse_failures;
  j["recall"] = r.recall;
  j["exact_order"] = r.exact_order;
  return j.dump();
}

std::string to_json_line(const SimulationSummary& s) {
  nlohmann::ordered_json j;
  j["type"] = "summary";
  j["method"] = method_name(s.method);
  j["n"] = s.n;
  j["k"] = s.k;
  j["c"] = s.c ? nlohmann::ordered_json(*s.c) : nlohmann::ordered_json(nullptr);
  j["noise_p"] = s.noise_p;
  j["init"] = provenance_name(s.init);
  j["runs"] = s.runs;
  j["mean_inferences"] = s.mean_inferences;
  j["stddev_inferences"] = s.stddev_inferences;
  j["mean_prompt_tokens"] = s.mean_prompt_tokens;
  j["mean_generated_tokens"] = s.mean_generated_tokens;
  j["mean_recall"] = s.mean_recall;
  j["stddev_recall"] = s.stddev_recall;
  j["exact_fraction"] = s.exact_fraction;
  return j.dump();
}

}  // namespace setrank
