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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "sparseforest/dataset.hpp"
#include "sparseforest/tree.hpp"

namespace sparseforest {

/// Training-sample summary of one tree: per-leaf point count and mean response.
/// Empty leaves have count 0 and mean 0.
struct LeafTable {
  std::vector<std::uint32_t> count;
  std::vector<double> mean;
};

LeafTable tabulate_leaves(const RandomTree& tree, const Dataset& data);
LeafTable tabulate_leaves(const RandomTree& tree, const Dataset& data,
                          std::span<const double> response);

/// M trees grown over [0,1]^d plus their leaf tables on the training sample.
class Forest {
 public:
  Forest(ForestConfig config, std::shared_ptr<const Dataset> data,
         std::vector<RandomTree> trees, std::vector<LeafTable> tables);

  const ForestConfig& config() const noexcept { return config_; }
  const Dataset& data() const noexcept { return *data_; }
  std::shared_ptr<const Dataset> data_ptr() const noexcept { return data_; }
  std::size_t size() const noexcept { return trees_.size(); }
  std::size_t d() const noexcept { return d_; }
  const RandomTree& tree(std::size_t i) const { return trees_[i]; }
  const LeafTable& table(std::size_t i) const { return tables_[i]; }
  std::span<const RandomTree> trees() const noexcept { return trees_; }

  /// Output of tree i at x: its leaf mean, or 0 on an empty leaf.
  double tree_output(std::size_t i, std::span<const double> x) const;
  double predict(std::span<const double> x) const;
  std::vector<double> predict_all(const Dataset& queries, unsigned threads = 1) const;

  /// Same partitions and weights W_ni, with `response` in place of the
  /// training Y (e.g. the true regression function at the data points).
  Forest reweighted(std::span<const double> response) const;

  /// Per-coordinate split totals summed over all trees.
  std::vector<std::uint64_t> split_counts() const;

 private:
  ForestConfig config_;
  std::shared_ptr<const Dataset> data_;
  std::vector<RandomTree> trees_;
  std::vector<LeafTable> tables_;
  std::size_t d_ = 0;
};

/// Grows config.trees trees. Tree i uses stream derive_seed(config.seed, i),
/// so the result is identical for any thread count.
Forest fit(const ForestConfig& config, const Dataset& data, unsigned threads = 1);

/// Mean response of the training points in x's leaf; exactly 0 if none.
double predict_tree(const RandomTree& tree, const Dataset& data, std::span<const double> x);

double predict(const Forest& forest, std::span<const double> x);

/// Serialized form holds the trees and leaf tables, not the training sample.
void save_forest(const Forest& forest, const std::filesystem::path& path);

/// Prediction-only model restored from disk.
struct StoredForest {
  std::size_t d = 0;
  std::vector<RandomTree> trees;
  std::vector<LeafTable> tables;
  double predict(std::span<const double> x) const;
};
StoredForest load_forest(const std::filesystem::path& path);

}  // namespace sparseforest
