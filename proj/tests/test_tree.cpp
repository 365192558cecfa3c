// Copyright 2026 The sparseforest Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "generators.hpp"
#include "sparseforest/errors.hpp"
#include "sparseforest/forest.hpp"
#include "sparseforest/models.hpp"
#include "sparseforest/tree.hpp"

using namespace sparseforest;

namespace {

ForestConfig random_config(std::size_t k_n, std::size_t d) {
  ForestConfig c;
  c.k_n = k_n;
  c.probs = SplitProbabilities::uniform(d);
  return c;
}

bool is_power_of_two_fraction(double side) {
  int exp = 0;
  return std::frexp(side, &exp) == 0.5;
}

}  // namespace

TEST_CASE("ceil_log2") {
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(3) == 2);
  CHECK(ceil_log2(5) == 3);
  CHECK(ceil_log2(8) == 3);
  CHECK(ceil_log2(1000) == 10);
  CHECK(ceil_log2(1024) == 10);
  CHECK(ceil_log2(1025) == 11);
}

TEST_CASE("split probabilities are validated") {
  CHECK_THROWS_AS(SplitProbabilities({1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(SplitProbabilities({0.5, 0.4}), ConfigError);
  CHECK_THROWS_AS(SplitProbabilities(std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(SplitProbabilities::uniform(1), ConfigError);
  CHECK_NOTHROW(SplitProbabilities({0.5, 0.5 + 1e-13}));
  CHECK_THROWS_AS(SplitProbabilities({0.5, 0.5 + 1e-11}), ConfigError);
  CHECK(SplitProbabilities::uniform(4)[2] == 0.25);
}

TEST_CASE("tree sizes follow ceil(log2 k_n)") {
  Rng rng(1);
  const Dataset empty(2);
  for (auto [k, leaves] : {std::pair{2, 2}, {5, 8}, {1000, 1024}}) {
    const auto tree = build_tree(random_config(k, 2), empty, rng);
    CHECK(tree.leaf_count() == static_cast<std::size_t>(leaves));
    CHECK(tree.depth() == ceil_log2(k));
    for (const auto& cell : tree.leaf_cells()) CHECK(cell.measure() == 1.0 / leaves);
  }
}

TEST_CASE("leaf cells partition the cube exactly (property)") {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + rng.index(5);
    const std::size_t k = 2 + rng.index(300);
    ForestConfig c;
    c.k_n = k;
    c.probs = testing::random_probs(d, rng);
    const auto tree = build_tree(c, Dataset(d), rng);
    const auto cells = tree.leaf_cells();
    const double expected = std::ldexp(1.0, -static_cast<int>(ceil_log2(k)));
    double total = 0.0;
    for (const auto& cell : cells) {
      REQUIRE(cell.measure() == expected);
      total += cell.measure();
      for (std::size_t j = 0; j < d; ++j) {
        REQUIRE(is_power_of_two_fraction(cell.side(j)));
        // lo is a multiple of the side: a dyadic interval
        REQUIRE(std::fmod(cell.lo[j], cell.side(j)) == 0.0);
      }
    }
    CHECK(total == 1.0);
    for (int q = 0; q < 50; ++q) {
      const auto x = testing::random_point(d, rng);
      std::size_t owners = 0;
      for (const auto& cell : cells) owners += cell.contains(x);
      REQUIRE(owners == 1);
      REQUIRE(cells[tree.leaf_index(x)].contains(x));
      const auto K = tree.path_split_counts(x);
      std::uint32_t sum = 0;
      for (auto v : K) sum += v;
      REQUIRE(sum == ceil_log2(k));
      for (std::size_t j = 0; j < d; ++j)
        REQUIRE(cells[tree.leaf_index(x)].side(j) == std::ldexp(1.0, -static_cast<int>(K[j])));
    }
    std::uint32_t internal = 0;
    for (auto v : tree.split_counts()) internal += v;
    CHECK(internal == tree.internal_count());
    CHECK(tree.internal_count() + 1 == tree.leaf_count());
  }
}

TEST_CASE("corner points land in a leaf") {
  Rng rng(3);
  const auto tree = build_tree(random_config(64, 3), Dataset(3), rng);
  for (std::vector<double> x : {std::vector<double>{0, 0, 0}, {1, 1, 1}, {1, 0, 0.5}})
    CHECK(tree.leaf_cell(tree.leaf_index(x)).contains(x));
  CHECK(tree.cell_of(std::vector<double>{1, 1, 1}).hi[0] == 1.0);
}

TEST_CASE("choose_coordinate_random matches p") {
  SUBCASE("p = (0.7, 0.3), 1e5 draws") {
    Rng rng(4);
    const SplitProbabilities p({0.7, 0.3});
    int first = 0;
    for (int i = 0; i < 100000; ++i) first += choose_coordinate_random(p, rng) == 0;
    CHECK(std::abs(first / 1e5 - 0.7) <= 0.0045);
  }
  SUBCASE("near-degenerate mass") {
    Rng rng(5);
    const double eps = 1e-9;
    const SplitProbabilities p({1 - eps, eps / 2, eps / 2});
    for (int i = 0; i < 1000; ++i) REQUIRE(choose_coordinate_random(p, rng) == 0);
  }
  SUBCASE("1e6 draws within 3 standard errors") {
    Rng rng(6);
    const auto p = testing::random_probs(5, rng);
    std::vector<int> counts(5, 0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) ++counts[choose_coordinate_random(p, rng)];
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(std::abs(counts[j] / double(n) - p[j]) <= 3 * std::sqrt(p[j] * (1 - p[j]) / n));
  }
}

TEST_CASE("sample_candidates") {
  Rng rng(7);
  const auto with = sample_candidates(5, 12, true, rng);
  CHECK(with.size() == 12);
  for (auto j : with) CHECK(j < 5);
  const auto without = sample_candidates(10, 4, false, rng);
  CHECK(std::set<std::size_t>(without.begin(), without.end()).size() == 4);
  const auto all = sample_candidates(6, 6, false, rng);
  CHECK(std::set<std::size_t>(all.begin(), all.end()) == std::set<std::size_t>{0, 1, 2, 3, 4, 5});
  CHECK_THROWS_AS(sample_candidates(3, 4, false, rng), ConfigError);

  // every subset position is equally likely without replacement
  std::vector<int> hits(8, 0);
  for (int i = 0; i < 80000; ++i)
    for (auto j : sample_candidates(8, 2, false, rng)) ++hits[j];
  for (int h : hits) CHECK(std::abs(h - 20000) < 4 * std::sqrt(20000 * 0.75));
}

TEST_CASE("ideal_cut_probability") {
  CHECK(ideal_cut_probability(4, 4, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(ideal_cut_probability(4, 4, 9) == doctest::Approx(0.25).epsilon(1e-15));
  // (1/5)(1 - 0.95^20), evaluated independently
  CHECK(ideal_cut_probability(5, 100, 20) == doctest::Approx(0.12830281551829162).epsilon(1e-14));
  CHECK(ideal_cut_probability(5, 100, 2000) == doctest::Approx(0.2).epsilon(1e-12));
  double prev = 0.0;
  for (std::size_t m = 1; m < 200; ++m) {
    const double v = ideal_cut_probability(3, 50, m);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(ideal_cut_probability(0, 10, 3), DomainError);
  CHECK_THROWS_AS(ideal_cut_probability(11, 10, 3), DomainError);
  CHECK_THROWS_AS(ideal_cut_probability(1, 10, 0), DomainError);
}

TEST_CASE("tie rule") {
  CHECK(tied(1.0, 1.0));
  CHECK(tied(1.0, 1.0 + 1e-13));
  CHECK_FALSE(tied(1.0, 1.0 + 1e-9));
  CHECK_FALSE(tied(0.0, 1e-30));
  CHECK(tied(0.0, 1e-30, 1.0));
}

TEST_CASE("sse_decrease matches the two-pass definition") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto data = testing::random_dataset(1 + rng.index(40), 3, rng);
    std::vector<std::uint32_t> idx(data.n());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t j = rng.index(3);
    const double s = rng.uniform();
    std::vector<double> all, left, right;
    for (std::size_t i = 0; i < data.n(); ++i) {
      all.push_back(data.y(i));
      (data.x(i, j) < s ? left : right).push_back(data.y(i));
    }
    const double oracle = testing::sum_of_squares(all) - testing::sum_of_squares(left) -
                          testing::sum_of_squares(right);
    CHECK(std::abs(sse_decrease(data, idx, j, s) - oracle) <=
          1e-9 * (1.0 + testing::sum_of_squares(all)));
  }
}

TEST_CASE("guided split picks the informative coordinate of a linear model") {
  Rng rng(9);
  Dataset sample(2);
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = testing::random_point(2, rng);
    sample.push_back(x, 2.0 * x[0]);
  }
  const std::vector<std::size_t> candidates{0, 1};
  const auto s = best_midpoint_split(Cell::unit(2), candidates, sample, rng);
  CHECK(s.coordinate == 0);
  CHECK(s.position == 0.5);
  // population weighted-variance decrease a^2/16 = 0.25, per point
  CHECK(s.decrease / n == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("guided split on an empty cell is a uniform choice over distinct candidates") {
  Dataset sample(3);
  sample.push_back(std::vector<double>{0.9, 0.9, 0.9}, 1.0);
  const Cell corner{{0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}};
  const std::vector<std::size_t> candidates{1, 1, 1, 2};
  Rng rng(10);
  int ones = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    const auto s = best_midpoint_split(corner, candidates, sample, rng);
    REQUIRE(s.decrease == 0.0);
    REQUIRE((s.coordinate == 1 || s.coordinate == 2));
    REQUIRE(s.position == 0.25);
    ones += s.coordinate == 1;
  }
  CHECK(std::abs(ones / double(trials) - 0.5) < 4 * std::sqrt(0.25 / trials));
}

TEST_CASE("guided split with one distinct candidate returns it") {
  Rng rng(11);
  const auto sample = testing::random_dataset(100, 4, rng);
  const std::vector<std::size_t> candidates{3, 3, 3};
  const auto s = best_midpoint_split(Cell::unit(4), candidates, sample, rng);
  CHECK(s.coordinate == 3);
  CHECK(s.position == 0.5);
}

TEST_CASE("CART split equals brute-force search") {
  Rng rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 2 + rng.index(3);
    const auto data = testing::random_dataset(2 + rng.index(30), d, rng);
    std::vector<std::uint32_t> idx(data.n());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::size_t> all(d);
    for (std::size_t j = 0; j < d; ++j) all[j] = j;
    const auto best = best_cart_split(all, data, idx, rng);
    REQUIRE(best.has_value());
    double oracle = -1.0;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < data.n(); ++i)
        oracle = std::max(oracle, sse_decrease(data, idx, j, data.x(i, j)));
    CHECK(best->decrease == doctest::Approx(oracle).epsilon(1e-9));
    // the chosen threshold separates the sample the same way
    CHECK(sse_decrease(data, idx, best->coordinate, best->position) ==
          doctest::Approx(best->decrease).epsilon(1e-9));
    std::size_t below = 0;
    for (std::size_t i = 0; i < data.n(); ++i) below += data.x(i, best->coordinate) < best->position;
    CHECK(below > 0);
    CHECK(below < data.n());
  }
}

TEST_CASE("CART split needs two distinct values") {
  Rng rng(13);
  Dataset same(2);
  for (int i = 0; i < 5; ++i) same.push_back(std::vector<double>{0.3, 0.3}, i);
  std::vector<std::uint32_t> idx{0, 1, 2, 3, 4};
  const std::vector<std::size_t> all{0, 1};
  CHECK_FALSE(best_cart_split(all, same, idx, rng).has_value());
  std::vector<std::uint32_t> one{0};
  CHECK_FALSE(best_cart_split(all, same, one, rng).has_value());
}

TEST_CASE("CART trees get ceil(n/5) leaves") {
  Rng rng(14);
  const auto data = testing::random_dataset(100, 5, rng);
  ForestConfig c;
  c.policy = SplitPolicy::cart();
  c.m_try = 2;
  const auto tree = build_tree(c, data, rng);
  CHECK(tree.leaf_count() == 20);
  CHECK(tree.leaf_shortfall == 0);
}

TEST_CASE("CART reports a shortfall when the data cannot be split further") {
  Dataset data(2);
  for (int i = 0; i < 30; ++i)
    data.push_back(std::vector<double>{i % 3 / 2.0, 0.5}, static_cast<double>(i % 3));
  ForestConfig c;
  c.policy = SplitPolicy::cart();
  c.m_try = 1;
  c.target_leaves = 6;
  Rng rng(15);
  const auto tree = build_tree(c, data, rng);
  CHECK(tree.leaf_count() == 3);
  CHECK(tree.leaf_shortfall == 3);
}

TEST_CASE("CART realizes the piecewise-constant tree model on noiseless data") {
  Rng rng(16);
  const auto model = SyntheticModel::tree(8, 0.0);
  const auto data = generate(model, 2000, rng);
  ForestConfig c;
  c.policy = SplitPolicy::cart();
  c.m_try = 8;
  c.trees = 3;
  c.seed = 4;
  const Forest forest = fit(c, data);
  double sse = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double e = forest.predict(data.row(i)) - data.y(i);
    sse += e * e;
  }
  CHECK(sse / data.n() < 1e-20);
}

TEST_CASE("builds are deterministic in the stream") {
  Rng data_rng(17);
  const auto sample = testing::random_dataset(300, 6, data_rng);
  ForestConfig c;
  c.k_n = 64;
  c.m_try = 6;
  c.policy = SplitPolicy::guided(sample);
  Rng a(99), b(99);
  const auto ta = build_tree(c, sample, a);
  const auto tb = build_tree(c, sample, b);
  REQUIRE(ta.nodes().size() == tb.nodes().size());
  for (std::size_t i = 0; i < ta.nodes().size(); ++i) {
    CHECK(ta.nodes()[i].coordinate == tb.nodes()[i].coordinate);
    CHECK(ta.nodes()[i].threshold == tb.nodes()[i].threshold);
  }
}

TEST_CASE("guided trees cut at cell midpoints") {
  Rng rng(18);
  const auto sample = testing::random_dataset(500, 3, rng);
  ForestConfig c;
  c.k_n = 32;
  c.m_try = 3;
  c.policy = SplitPolicy::guided(sample);
  const auto tree = build_tree(c, Dataset(3), rng);
  CHECK(tree.leaf_count() == 32);
  for (const auto& cell : tree.leaf_cells()) {
    CHECK(cell.measure() == 1.0 / 32);
    for (std::size_t j = 0; j < 3; ++j) CHECK(is_power_of_two_fraction(cell.side(j)));
  }
}

TEST_CASE("config validation") {
  Rng rng(19);
  const auto data = testing::random_dataset(10, 3, rng);
  ForestConfig c;
  CHECK_NOTHROW(c.validate(3));
  CHECK_THROWS_AS(c.validate(1), ConfigError);
  c.k_n = 1;
  CHECK_THROWS_AS(c.validate(3), ConfigError);
  c.k_n = 4;
  c.trees = 0;
  CHECK_THROWS_AS(c.validate(3), ConfigError);
  c.trees = 1;
  c.m_try = 0;
  CHECK_THROWS_AS(c.validate(3), ConfigError);
  c.m_try = 1;
  c.probs = SplitProbabilities::uniform(4);
  CHECK_THROWS_AS(c.validate(3), DimensionError);
  c.probs = {};
  c.policy.kind = PolicyKind::SecondSampleGuided;
  CHECK_THROWS_AS(c.validate(3), ConfigError);
  c.policy = SplitPolicy::guided(Dataset(3));
  CHECK_THROWS_AS(c.validate(3), ConfigError);
  c.policy = SplitPolicy::guided(testing::random_dataset(5, 2, rng));
  CHECK_THROWS_AS(c.validate(3), DimensionError);
  c.policy = SplitPolicy::cart();
  c.m_try = 4;
  CHECK_THROWS_AS(c.validate(3), ConfigError);
}

TEST_CASE("policy names") {
  for (auto k : {PolicyKind::PurelyRandom, PolicyKind::SecondSampleGuided, PolicyKind::CartEmpirical})
    CHECK(policy_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(policy_from_string("bagging"), ConfigError);
}
