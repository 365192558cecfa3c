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

#include <cmath>
#include <filesystem>

#include "generators.hpp"
#include "sparseforest/errors.hpp"
#include "sparseforest/forest.hpp"
#include "sparseforest/models.hpp"
#include "sparseforest/stats.hpp"

using namespace sparseforest;

namespace {

// Root split on x1 at 0.5, two leaves.
RandomTree stump() {
  std::vector<TreeNode> nodes(3);
  nodes[0].coordinate = 0;
  nodes[0].threshold = 0.5;
  nodes[0].left = 1;
  nodes[0].right = 2;
  return RandomTree(2, nodes);
}

}  // namespace

TEST_CASE("predict_tree averages the leaf and returns 0 on an empty leaf") {
  Dataset data(2);
  data.push_back(std::vector<double>{0.1, 0.3}, 2.0);
  data.push_back(std::vector<double>{0.4, 0.9}, 4.0);
  const auto tree = stump();
  CHECK(predict_tree(tree, data, std::vector<double>{0.2, 0.2}) == 3.0);
  CHECK(predict_tree(tree, data, std::vector<double>{0.7, 0.2}) == 0.0);
  CHECK_THROWS_AS(predict_tree(tree, data, std::vector<double>{0.2}), DimensionError);
  CHECK_THROWS_AS(predict_tree(tree, data, std::vector<double>{0.2, 1.5}), DomainError);

  const auto table = tabulate_leaves(tree, data);
  CHECK(table.count[0] == 2);
  CHECK(table.count[1] == 0);
  CHECK(table.mean[1] == 0.0);
}

TEST_CASE("forest prediction is the average of brute-force tree outputs (property)") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 2 + rng.index(4);
    const auto data = testing::random_dataset(20 + rng.index(200), d, rng);
    ForestConfig c;
    c.k_n = 2 + rng.index(60);
    c.trees = 1 + rng.index(12);
    c.seed = rng.next();
    switch (trial % 3) {
      case 0: c.probs = testing::random_probs(d, rng); break;
      case 1:
        c.policy = SplitPolicy::guided(testing::random_dataset(100, d, rng));
        c.m_try = 1 + rng.index(2 * d);
        break;
      default:
        c.policy = SplitPolicy::cart();
        c.m_try = 1 + rng.index(d);
    }
    const Forest forest = fit(c, data);
    REQUIRE(forest.size() == c.trees);
    for (int q = 0; q < 20; ++q) {
      const auto x = testing::random_point(d, rng);
      double sum = 0.0;
      for (std::size_t i = 0; i < forest.size(); ++i) {
        const double brute = predict_tree(forest.tree(i), data, x);
        REQUIRE(forest.tree_output(i, x) == doctest::Approx(brute).epsilon(1e-12));
        sum += brute;
      }
      CHECK(forest.predict(x) == doctest::Approx(sum / forest.size()).epsilon(1e-12));
      CHECK(predict(forest, x) == forest.predict(x));
    }
  }
}

TEST_CASE("k_n = 5, one purely random tree: 8 leaves of measure 1/8") {
  Rng rng(2);
  const auto data = testing::random_dataset(50, 2, rng);
  ForestConfig c;
  c.k_n = 5;
  const Forest forest = fit(c, data);
  CHECK(forest.tree(0).leaf_count() == 8);
  for (const auto& cell : forest.tree(0).leaf_cells()) CHECK(cell.measure() == 0.125);
}

TEST_CASE("fit is reproducible and thread-count independent") {
  Rng rng(3);
  const auto data = testing::random_dataset(300, 4, rng);
  ForestConfig c;
  c.k_n = 4;
  c.trees = 100;
  c.seed = 7;
  const Forest a = fit(c, data, 1);
  const Forest b = fit(c, data, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto sa = a.tree(i).split_counts();
    const auto sb = b.tree(i).split_counts();
    REQUIRE(std::equal(sa.begin(), sa.end(), sb.begin(), sb.end()));
  }
  // tree i depends on (seed, i) only
  c.trees = 10;
  const Forest small = fit(c, data);
  for (std::size_t i = 0; i < small.size(); ++i)
    for (std::size_t k = 0; k < small.tree(i).nodes().size(); ++k)
      REQUIRE(small.tree(i).nodes()[k].coordinate == a.tree(i).nodes()[k].coordinate);

  const auto queries = testing::random_dataset(50, 4, rng);
  CHECK(a.predict_all(queries, 1) == a.predict_all(queries, 3));
}

TEST_CASE("fit errors") {
  Rng rng(4);
  ForestConfig c;
  CHECK_THROWS_AS(fit(c, Dataset(3)), ConfigError);
  const auto data = testing::random_dataset(10, 3, rng);
  c.policy = SplitPolicy::guided(testing::random_dataset(10, 2, rng));
  CHECK_THROWS_AS(fit(c, data), DimensionError);
  c.policy = SplitPolicy::purely_random();
  CHECK_THROWS_AS(c.probs = SplitProbabilities({1.0, 0.0}), ConfigError);
}

TEST_CASE("reweighting with the observed responses reproduces the forest") {
  Rng rng(5);
  const auto data = testing::random_dataset(200, 3, rng);
  ForestConfig c;
  c.k_n = 16;
  c.trees = 20;
  const Forest forest = fit(c, data);
  const Forest same = forest.reweighted(data.ys());
  std::vector<double> doubled(data.ys().begin(), data.ys().end());
  for (auto& v : doubled) v *= 2.0;
  const Forest twice = forest.reweighted(doubled);
  for (int q = 0; q < 50; ++q) {
    const auto x = testing::random_point(3, rng);
    CHECK(same.predict(x) == forest.predict(x));
    CHECK(twice.predict(x) == doctest::Approx(2.0 * forest.predict(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(forest.reweighted(std::vector<double>(3, 0.0)), DimensionError);
}

TEST_CASE("query validation") {
  Rng rng(6);
  const auto data = testing::random_dataset(20, 3, rng);
  const Forest forest = fit(ForestConfig{}, data);
  CHECK_THROWS_AS(forest.predict(std::vector<double>{0.5, 0.5}), DimensionError);
  CHECK_THROWS_AS(forest.predict(std::vector<double>{0.5, 0.5, -0.1}), DomainError);
  CHECK_THROWS_AS(forest.predict_all(Dataset(2)), DimensionError);
}

TEST_CASE("save and load keep predictions bit-identical") {
  Rng rng(7);
  const auto data = testing::random_dataset(150, 4, rng);
  ForestConfig c;
  c.policy = SplitPolicy::cart();
  c.m_try = 2;
  c.trees = 8;
  const Forest forest = fit(c, data);
  const auto path = std::filesystem::temp_directory_path() / "sparseforest_forest_test.json";
  save_forest(forest, path);
  const StoredForest stored = load_forest(path);
  CHECK(stored.d == 4);
  CHECK(stored.trees.size() == 8);
  for (int q = 0; q < 100; ++q) {
    const auto x = testing::random_point(4, rng);
    CHECK(stored.predict(x) == forest.predict(x));
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_forest(path), DataError);
}

TEST_CASE("split counts along a path follow Binomial(levels, p_j)") {
  // E[K_j] = levels * p_j with p = (0.5, 0.3, 0.2), 4 levels.
  Rng rng(8);
  ForestConfig c;
  c.k_n = 16;
  c.probs = SplitProbabilities({0.5, 0.3, 0.2});
  std::vector<std::uint64_t> counts(5, 0);
  const int trees = 20000;
  std::vector<double> k0;
  for (int t = 0; t < trees; ++t) {
    const auto tree = build_tree(c, Dataset(3), rng);
    const auto K = tree.path_split_counts(testing::random_point(3, rng));
    ++counts[K[0]];
    k0.push_back(K[0]);
  }
  const auto result = chi_square_gof(counts, binomial_pmf(4, 0.5));
  CHECK(result.passes(0.001));
  CHECK(std::abs(mean_se(k0).mean - 2.0) < 3 * mean_se(k0).se);
}
