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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "setrank/rankers.hpp"
#include "setrank/simulate.hpp"

using namespace setrank;

TEST_CASE("instances are deterministic and consistent") {
  const auto a = make_instance(50, 3);
  const auto b = make_instance(50, 3);
  const auto c = make_instance(50, 4);
  CHECK(a.true_order == b.true_order);
  CHECK(a.true_order != c.true_order);
  REQUIRE(a.true_order.size() == 50);
  for (std::size_t i = 1; i < 50; ++i)
    CHECK(a.true_score.at(a.true_order[i - 1]) >= a.true_score.at(a.true_order[i]));
  CHECK(a.candidates.size() == 50);
  CHECK(a.candidates.query().query_id == "q3");
}

TEST_CASE("first-stage noise controls correlation with the truth") {
  auto top_overlap = [](double sigma) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto inst = make_instance(100, seed, sigma);
      int hits = 0;
      for (int i = 0; i < 10; ++i)
        hits += std::find(inst.true_order.begin(), inst.true_order.begin() + 10,
                          inst.candidates.items()[i].doc_id) != inst.true_order.begin() + 10;
      total += hits;
    }
    return total / 500.0;
  };
  const double sharp = top_overlap(0.1);
  const double loose = top_overlap(1.0);
  const double random = top_overlap(std::numeric_limits<double>::infinity());
  CHECK(sharp > loose);
  CHECK(loose > random);
  CHECK(random < 0.3);
}

TEST_CASE("provenance names") {
  for (Provenance p : {Provenance::kAsIs, Provenance::kInverted, Provenance::kShuffled})
    CHECK(parse_provenance(provenance_name(p)) == p);
  CHECK_THROWS_AS(parse_provenance("sorted"), ConfigurationError);
  const auto inst = make_instance(10, 1);
  CHECK(arrange(inst, Provenance::kInverted, 0).items().front().doc_id ==
        inst.candidates.items().back().doc_id);
  CHECK(arrange(inst, Provenance::kShuffled, 5).provenance() == Provenance::kShuffled);
}

TEST_CASE("simulate enumerates the grid") {
  SimulationConfig config;
  config.methods = {Method::kSetwiseHeapsort, Method::kPairwiseHeapsort,
                    Method::kListwiseGeneration};
  config.n = 30;
  config.k = 5;
  config.c_list = {3, 5};
  config.noise = {0.0, 0.2};
  config.inits = {Provenance::kAsIs, Provenance::kShuffled};
  config.seeds = 3;
  std::size_t streamed = 0;
  const auto records = simulate(config, [&](const SimulationRecord&) { ++streamed; });
  // setwise: 2 c values; pairwise and listwise: one each.
  CHECK(records.size() == 3 * (2 + 1 + 1) * 2 * 2);
  CHECK(streamed == records.size());
  for (const auto& r : records) {
    CHECK(r.recall >= 0.0);
    CHECK(r.recall <= 1.0);
    RankerConfig rc;
    rc.method = r.method;
    rc.k = r.k;
    rc.c = r.c.value_or(3);
    CHECK(r.inferences <= max_inferences(rc, r.n));
    if (r.noise_p == 0.0) {
      CHECK(r.exact_order);
      CHECK(r.recall == 1.0);
    }
    if (r.method == Method::kPairwiseHeapsort) CHECK(r.c == 2);
    if (r.method == Method::kListwiseGeneration) CHECK_FALSE(r.c.has_value());
  }

  const auto summaries = summarize(records);
  CHECK(summaries.size() == (2 + 1 + 1) * 2 * 2);
  for (const auto& s : summaries) {
    CHECK(s.runs == 3);
    CHECK(s.mean_recall <= 1.0);
    CHECK(s.stddev_inferences >= 0.0);
  }
}

TEST_CASE("simulation validates inputs") {
  SimulationConfig config;
  config.k = 0;
  CHECK_THROWS_AS(simulate(config), ConfigurationError);
  config.k = 10;
  config.n = 5;
  CHECK_THROWS_AS(simulate(config), ConfigurationError);
  config.n = 20;
  config.noise = {1.5};
  CHECK_THROWS_AS(simulate(config), ConfigurationError);
}

TEST_CASE("records serialize to one JSON object per line") {
  SimulationConfig config;
  config.n = 12;
  config.k = 3;
  config.seeds = 2;
  const auto records = simulate(config);
  for (const auto& r : records) {
    const std::string line = to_json_line(r);
    CHECK(line.find('\n') == std::string::npos);
    const auto j = nlohmann::json::parse(line);
    CHECK(j["type"] == "record");
    CHECK(j["method"] == "setwise.heapsort");
    CHECK(j["inferences"].get<std::uint64_t>() == r.inferences);
    CHECK(j["exact_order"].get<bool>());
  }
  const auto j = nlohmann::json::parse(to_json_line(summarize(records).front()));
  CHECK(j["type"] == "summary");
  CHECK(j["runs"] == 2);
  CHECK(j["c"] == 3);
}
