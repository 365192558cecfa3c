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

#include "sparseforest/forest.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "sparseforest/errors.hpp"
#include "sparseforest/parallel.hpp"

namespace sparseforest {

LeafTable tabulate_leaves(const RandomTree& tree, const Dataset& data,
                          std::span<const double> response) {
  if (response.size() != data.n()) throw DimensionError("response length differs from n");
  LeafTable table;
  table.count.assign(tree.leaf_count(), 0);
  table.mean.assign(tree.leaf_count(), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto leaf = tree.leaf_index(data.row(i));
    ++table.count[leaf];
    table.mean[leaf] += response[i];
  }
  for (std::size_t l = 0; l < table.mean.size(); ++l)
    if (table.count[l]) table.mean[l] /= static_cast<double>(table.count[l]);
  return table;
}

LeafTable tabulate_leaves(const RandomTree& tree, const Dataset& data) {
  return tabulate_leaves(tree, data, data.ys());
}

Forest::Forest(ForestConfig config, std::shared_ptr<const Dataset> data,
               std::vector<RandomTree> trees, std::vector<LeafTable> tables)
    : config_(std::move(config)),
      data_(std::move(data)),
      trees_(std::move(trees)),
      tables_(std::move(tables)),
      d_(data_->d()) {
  if (trees_.empty()) throw ConfigError("a forest needs at least one tree");
  if (tables_.size() != trees_.size()) throw ConfigError("one leaf table per tree required");
}

double Forest::tree_output(std::size_t i, std::span<const double> x) const {
  return tables_[i].mean[trees_[i].leaf_index(x)];
}

double Forest::predict(std::span<const double> x) const {
  if (x.size() != d_) throw DimensionError("query point has the wrong dimension");
  if (!in_unit_cube(x)) throw DomainError("query point outside [0,1]^d");
  double sum = 0.0;
  for (std::size_t i = 0; i < trees_.size(); ++i) sum += tree_output(i, x);
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> Forest::predict_all(const Dataset& queries, unsigned threads) const {
  if (queries.d() != d_) throw DimensionError("query set has the wrong dimension");
  std::vector<double> out(queries.n());
  parallel_for(queries.n(), threads, [&](std::size_t q) { out[q] = predict(queries.row(q)); });
  return out;
}

Forest Forest::reweighted(std::span<const double> response) const {
  std::vector<LeafTable> tables;
  tables.reserve(trees_.size());
  for (const auto& tree : trees_) tables.push_back(tabulate_leaves(tree, *data_, response));
  return Forest(config_, data_, trees_, std::move(tables));
}

std::vector<std::uint64_t> Forest::split_counts() const {
  std::vector<std::uint64_t> total(d_, 0);
  for (const auto& tree : trees_) {
    const auto counts = tree.split_counts();
    for (std::size_t j = 0; j < d_; ++j) total[j] += counts[j];
  }
  return total;
}

Forest fit(const ForestConfig& config, const Dataset& data, unsigned threads) {
  if (data.empty()) throw ConfigError("cannot fit a forest on an empty dataset");
  config.validate(data.d());
  auto shared = std::make_shared<const Dataset>(data);
  std::vector<RandomTree> trees(config.trees);
  std::vector<LeafTable> tables(config.trees);
  parallel_for(config.trees, threads, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, i));
    trees[i] = build_tree(config, *shared, rng);
    tables[i] = tabulate_leaves(trees[i], *shared);
  });
  return Forest(config, std::move(shared), std::move(trees), std::move(tables));
}

double predict_tree(const RandomTree& tree, const Dataset& data, std::span<const double> x) {
  if (x.size() != tree.d()) throw DimensionError("query point has the wrong dimension");
  if (!in_unit_cube(x)) throw DomainError("query point outside [0,1]^d");
  const Cell cell = tree.cell_of(x);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (cell.contains(data.row(i))) {
      sum += data.y(i);
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

double predict(const Forest& forest, std::span<const double> x) { return forest.predict(x); }

// ---- persistence --------------------------------------------------------------

void save_forest(const Forest& forest, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "sparseforest-forest-v1";
  j["d"] = forest.d();
  j["n"] = forest.data().n();
  j["policy"] = to_string(forest.config().policy.kind);
  j["k_n"] = forest.config().k_n;
  j["seed"] = forest.config().seed;
  auto& trees = j["trees"] = nlohmann::json::array();
  for (std::size_t t = 0; t < forest.size(); ++t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : forest.tree(t).nodes()) {
      if (node.coordinate < 0)
        nodes.push_back(nlohmann::json::array({-1}));
      else
        nodes.push_back({node.coordinate, node.threshold, node.left, node.right});
    }
    trees.push_back({{"nodes", std::move(nodes)},
                     {"leaf_count", forest.table(t).count},
                     {"leaf_mean", forest.table(t).mean}});
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << '\n';
}

StoredForest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  StoredForest forest;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "sparseforest-forest-v1") throw DataError("unknown forest format");
    forest.d = j.at("d").get<std::size_t>();
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : t.at("nodes")) {
        TreeNode node;
        if (n.at(0).get<int>() >= 0) {
          node.coordinate = n.at(0).get<std::int32_t>();
          node.threshold = n.at(1).get<double>();
          node.left = n.at(2).get<std::int32_t>();
          node.right = n.at(3).get<std::int32_t>();
        }
        nodes.push_back(node);
      }
      RandomTree tree(forest.d, std::move(nodes));
      LeafTable table{t.at("leaf_count").get<std::vector<std::uint32_t>>(),
                      t.at("leaf_mean").get<std::vector<double>>()};
      if (table.count.size() != tree.leaf_count() || table.mean.size() != tree.leaf_count())
        throw DataError("leaf table size mismatch");
      forest.trees.push_back(std::move(tree));
      forest.tables.push_back(std::move(table));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (forest.trees.empty()) throw DataError(path.string() + ": forest has no trees");
  return forest;
}

double StoredForest::predict(std::span<const double> x) const {
  if (x.size() != d) throw DimensionError("query point has the wrong dimension");
  if (!in_unit_cube(x)) throw DomainError("query point outside [0,1]^d");
  double sum = 0.0;
  for (std::size_t i = 0; i < trees.size(); ++i) sum += tables[i].mean[trees[i].leaf_index(x)];
  return sum / static_cast<double>(trees.size());
}

}  // namespace sparseforest
