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
#include <numeric>
#include <random>

#include "setrank/rankers.hpp"

using namespace setrank;

namespace {

/// Ideal selector over fixed values; counts calls.
struct CountingSelector {
  std::vector<double> value;
  std::size_t calls = 0;
  std::vector<std::size_t> sizes;

  CountingSelector() = default;
  explicit CountingSelector(std::vector<double> v) : value(std::move(v)) {}

  Selector fn() {
    return [this](std::span<const std::size_t> items) {
      ++calls;
      sizes.push_back(items.size());
      std::size_t best = 0;
      for (std::size_t i = 1; i < items.size(); ++i)
        if (value[items[i]] > value[items[best]]) best = i;
      return best;
    };
  }
};

struct Instance {
  CandidateList candidates;
  MockOracleSpec spec;
  std::vector<std::string> truth;  // ids by descending score, ties by position
};

Instance random_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Document> docs;
  MockOracleSpec spec;
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back({"d" + std::to_string(i), "passage " + std::to_string(i)});
    score[i] = normal(rng);
    spec.true_score[docs.back().doc_id] = score[i];
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<std::string> truth;
  for (std::size_t i : idx) truth.push_back(docs[i].doc_id);
  return {CandidateList({"q", "query"}, docs), spec, truth};
}

RankerConfig config_for(Method m, int k, int c = 3) {
  RankerConfig config;
  config.method = m;
  config.k = k;
  config.c = c;
  return config;
}

std::uint64_t listwise_windows(std::uint64_t n, std::uint64_t w, std::uint64_t s,
                               std::uint64_t r) {
  if (n < 2) return 0;
  if (n <= w) return r;
  return r * ((n - w + s - 1) / s + 1);
}

}  // namespace

TEST_CASE("heapify micro cases on a 9-node tree") {
  SUBCASE("c = 4: one call per level, 2 levels") {
    // Slots 1..3 are the root's children; slot 1 holds the largest and its
    // own children 4..6 hold the next largest.
    CountingSelector sel{{0, 9, 5, 4, 8, 3, 2, 7, 6}};
    HeapState heap({0, 1, 2, 3, 4, 5, 6, 7, 8}, 4);
    CHECK(heap.arity == 3);
    heap_sift_down(heap, 0, sel.fn());
    CHECK(sel.calls == 2);
    CHECK(sel.sizes == std::vector<std::size_t>{4, 4});
    CHECK(heap.slots[0] == 1);
    CHECK(heap.slots[1] == 4);
    CHECK(heap.slots[4] == 0);
  }
  SUBCASE("c = 2: two pair calls per level, 3 levels") {
    CountingSelector sel{{0, 9, 5, 8, 4, 3, 2, 7, 6}};
    HeapState heap({0, 1, 2, 3, 4, 5, 6, 7, 8}, 2);
    CHECK(heap.arity == 2);
    heap_sift_down(heap, 0, sel.fn());
    CHECK(sel.calls == 6);
    CHECK(std::all_of(sel.sizes.begin(), sel.sizes.end(), [](auto s) { return s == 2; }));
    CHECK(heap.slots[7] == 0);
  }
}

TEST_CASE("bubble pass micro cases over 5 nodes") {
  for (auto [c, expected] : {std::pair{3, 2}, std::pair{2, 4}}) {
    CAPTURE(c);
    CountingSelector sel{{1, 2, 3, 4, 5}};
    std::vector<std::size_t> order = {0, 1, 2, 3, 4};
    CHECK(bubble_pass(order, 0, c, sel.fn()));
    CHECK(sel.calls == static_cast<std::size_t>(expected));
    CHECK(order.front() == 4);
  }
}

TEST_CASE("heap build yields a valid m-ary max-heap") {
  for (int c : {2, 3, 4, 5, 9}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed);
      const std::size_t n = 1 + rng() % 60;
      CountingSelector sel;
      for (std::size_t i = 0; i < n; ++i) sel.value.push_back(static_cast<double>(rng() % 1000));
      std::vector<std::size_t> init(n);
      std::iota(init.begin(), init.end(), 0);
      HeapState heap(init, c);
      heap_build(heap, sel.fn());
      for (std::size_t i = 1; i < n; ++i)
        CHECK(sel.value[heap.slots[(i - 1) / heap.arity]] >= sel.value[heap.slots[i]]);
      for (std::size_t s : sel.sizes) CHECK(s <= static_cast<std::size_t>(c));
    }
  }
}

TEST_CASE("sort-based methods recover the exact top-k") {
  for (Method m : {Method::kSetwiseHeapsort, Method::kSetwiseBubblesort,
                   Method::kPairwiseHeapsort, Method::kPairwiseBubblesort}) {
    for (std::size_t n : {1, 2, 3, 7, 30}) {
      for (int k : {1, 3, 10}) {
        if (static_cast<std::size_t>(k) > n) continue;
        for (int c : {2, 3, 4, 9}) {
          for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto inst = random_instance(n, seed * 31 + n);
            MockOracle oracle(inst.spec);
            const auto result = rank(inst.candidates, oracle, config_for(m, k, c));
            CAPTURE(method_name(m));
            CAPTURE(n);
            CAPTURE(k);
            CAPTURE(c);
            REQUIRE(result.doc_ids.size() == n);
            CHECK(std::equal(inst.truth.begin(), inst.truth.begin() + k, result.doc_ids.begin()));
            auto sorted = result.doc_ids;
            std::sort(sorted.begin(), sorted.end());
            auto expected = inst.truth;
            std::sort(expected.begin(), expected.end());
            CHECK(sorted == expected);
            CHECK(result.cost.parse_failures == 0);
            CHECK(result.cost.num_inferences <= max_inferences(config_for(m, k, c), n));
          }
        }
      }
    }
  }
}

TEST_CASE("listwise call counts follow the window schedule") {
  for (std::size_t n : {1, 2, 3, 4, 5, 9, 20, 100}) {
    for (auto [w, s] : {std::pair{4, 2}, std::pair{4, 1}, std::pair{5, 5}, std::pair{20, 10}}) {
      for (int r : {1, 5}) {
        const auto inst = random_instance(n, n);
        MockOracle oracle(inst.spec);
        RankerConfig config = config_for(Method::kListwiseGeneration, 1);
        config.w = w;
        config.s = s;
        config.r = r;
        const auto result = rank(inst.candidates, oracle, config);
        CAPTURE(n);
        CAPTURE(w);
        CAPTURE(s);
        CHECK(result.cost.num_inferences == listwise_windows(n, w, s, r));
        CHECK(max_inferences(config, n) == listwise_windows(n, w, s, r));
        // Disjoint windows (s >= w) cannot carry a document past its window.
        if (s < w) CHECK(result.doc_ids.front() == inst.truth.front());
      }
    }
  }
}

TEST_CASE("listwise likelihood ranks windows by label mass") {
  const auto inst = random_instance(40, 5);
  MockOracle oracle(inst.spec);
  RankerConfig config = config_for(Method::kListwiseLikelihood, 10);
  const auto result = rank(inst.candidates, oracle, config);
  CHECK(std::equal(inst.truth.begin(), inst.truth.begin() + 10, result.doc_ids.begin()));
  CHECK(result.cost.generated_tokens == 0);
}

TEST_CASE("exact call counts for pointwise and all-pairs") {
  const auto inst = random_instance(12, 2);
  for (Method m : {Method::kPointwiseQlm, Method::kPointwiseYesNo}) {
    MockOracle oracle(inst.spec);
    const auto result = rank(inst.candidates, oracle, config_for(m, 5));
    CHECK(result.cost.num_inferences == 12);
    CHECK(result.doc_ids == inst.truth);
    REQUIRE(result.scores.size() == 12);
    CHECK(std::is_sorted(result.scores.rbegin(), result.scores.rend()));
  }
  MockOracle oracle(inst.spec);
  const auto all = rank(inst.candidates, oracle, config_for(Method::kPairwiseAllpair, 5));
  CHECK(all.cost.num_inferences == 12 * 11);
  CHECK(all.doc_ids == inst.truth);
  // The best document beats everyone in both presentation orders.
  CHECK(all.scores.front() == doctest::Approx(22.0));
  CHECK(all.scores.back() == doctest::Approx(0.0));
}

TEST_CASE("bubble sort stops early at c = 2 once nothing moves") {
  std::vector<Document> docs;
  MockOracleSpec spec;
  for (int i = 0; i < 10; ++i) {
    docs.push_back({"d" + std::to_string(i), "x"});
    spec.true_score["d" + std::to_string(i)] = 10.0 - i;
  }
  const CandidateList sorted({"q", "q"}, docs);
  MockOracle oracle(spec);
  const auto result = rank(sorted, oracle, config_for(Method::kPairwiseBubblesort, 5));
  CHECK(result.cost.num_inferences == 9);
  MockOracle oracle3(spec);
  const auto c3 = rank(sorted, oracle3, config_for(Method::kSetwiseBubblesort, 5, 3));
  CHECK(c3.cost.num_inferences == max_inferences(config_for(Method::kSetwiseBubblesort, 5, 3), 10));
}

TEST_CASE("setwise at c = 2 issues the same comparisons as pairwise") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = random_instance(25, seed);
    for (auto [set, pair] : {std::pair{Method::kSetwiseHeapsort, Method::kPairwiseHeapsort},
                             std::pair{Method::kSetwiseBubblesort, Method::kPairwiseBubblesort}}) {
      MockOracle a(inst.spec), b(inst.spec);
      RecordingOracle ra(a), rb(b);
      const auto x = rank(inst.candidates, ra, config_for(set, 10, 2));
      const auto y = rank(inst.candidates, rb, config_for(pair, 10, 2));
      CHECK(ra.doc_sequences() == rb.doc_sequences());
      CHECK(x.doc_ids == y.doc_ids);
    }
  }
}

TEST_CASE("parse failures fall back to no change and the sort completes") {
  struct Flaky final : Oracle {
    MockOracle inner;
    int calls = 0;
    explicit Flaky(MockOracleSpec spec) : inner(std::move(spec)) {}
    OracleResponse ask(const OracleRequest& r) override {
      if (++calls % 3 == 0) return {response::Failure{"garbage"}, Usage{5, 1}};
      return inner.ask(r);
    }
  };
  const auto inst = random_instance(30, 9);
  for (Method m : {Method::kSetwiseHeapsort, Method::kSetwiseBubblesort,
                   Method::kListwiseGeneration, Method::kPairwiseHeapsort}) {
    Flaky oracle(inst.spec);
    const auto result = rank(inst.candidates, oracle, config_for(m, 5));
    CHECK(result.doc_ids.size() == 30);
    CHECK(result.cost.parse_failures == result.cost.num_inferences / 3);
  }

  struct AlwaysFails final : Oracle {
    OracleResponse ask(const OracleRequest&) override { return {response::Failure{""}, {}}; }
  } broken;
  const auto heap = rank(inst.candidates, broken, config_for(Method::kSetwiseHeapsort, 5));
  CHECK(heap.doc_ids.front() == inst.candidates.items().front().doc_id);
  const auto list = rank(inst.candidates, broken, config_for(Method::kListwiseGeneration, 5));
  std::vector<std::string> input;
  for (const auto& d : inst.candidates.items()) input.push_back(d.doc_id);
  CHECK(list.doc_ids == input);
}

TEST_CASE("rank validates configuration and capabilities") {
  const auto inst = random_instance(5, 1);
  MockOracle oracle(inst.spec);
  CHECK_THROWS_AS(rank(inst.candidates, oracle, config_for(Method::kSetwiseHeapsort, 6)),
                  ConfigurationError);
  CHECK_THROWS_AS(rank(inst.candidates, oracle, config_for(Method::kSetwiseHeapsort, 3, 27)),
                  ConfigurationError);

  Capabilities gen_only;
  gen_only.logits = false;
  gen_only.query_likelihood = false;
  MockOracle limited(inst.spec, gen_only);
  CHECK_THROWS_AS(rank(inst.candidates, limited, config_for(Method::kPointwiseYesNo, 3)),
                  CapabilityUnsupported);
  CHECK_THROWS_AS(rank(inst.candidates, limited, config_for(Method::kPointwiseQlm, 3)),
                  CapabilityUnsupported);
  CHECK_THROWS_AS(rank(inst.candidates, limited, config_for(Method::kListwiseLikelihood, 3)),
                  CapabilityUnsupported);
  RankerConfig logits = config_for(Method::kSetwiseHeapsort, 3);
  logits.scoring_mode = ScoringMode::kLogits;
  CHECK_THROWS_AS(rank(inst.candidates, limited, logits), CapabilityUnsupported);
  CHECK_NOTHROW(rank(inst.candidates, limited, config_for(Method::kSetwiseHeapsort, 3)));
  CHECK_NOTHROW(rank(inst.candidates, limited, config_for(Method::kListwiseGeneration, 3)));
}

TEST_CASE("ceilings") {
  CHECK(max_inferences(config_for(Method::kPointwiseYesNo, 10), 100) == 100);
  CHECK(max_inferences(config_for(Method::kPairwiseAllpair, 10), 100) == 9900);
  CHECK(max_inferences(config_for(Method::kListwiseGeneration, 10), 100) == 245);
  // Each bubble pass p spends ceil((N - 1 - p) / (c - 1)) calls.
  std::uint64_t bubble = 0;
  for (int p = 0; p < 10; ++p) bubble += (99 - p + 1) / 2;
  CHECK(max_inferences(config_for(Method::kSetwiseBubblesort, 10, 3), 100) == bubble);
  CHECK(bubble == 475);
}

TEST_CASE("wall time is recorded") {
  const auto inst = random_instance(20, 3);
  MockOracle oracle(inst.spec);
  const auto result = rank(inst.candidates, oracle, config_for(Method::kSetwiseHeapsort, 5));
  CHECK(result.cost.wall_time.count() > 0);
}
