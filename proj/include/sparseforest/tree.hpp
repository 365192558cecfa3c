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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparseforest/dataset.hpp"
#include "sparseforest/rng.hpp"

namespace sparseforest {

/// Coordinate selection probabilities p_j, each in (0,1), summing to one.
class SplitProbabilities {
 public:
  SplitProbabilities() = default;
  explicit SplitProbabilities(std::vector<double> p);
  static SplitProbabilities uniform(std::size_t dim);

  std::size_t size() const noexcept { return p_.size(); }
  bool empty() const noexcept { return p_.empty(); }
  double operator[](std::size_t j) const noexcept { return p_[j]; }
  std::span<const double> values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
  std::vector<double> cumulative_;
  friend std::size_t choose_coordinate_random(const SplitProbabilities&, Rng&);
};

enum class PolicyKind { PurelyRandom, SecondSampleGuided, CartEmpirical };

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

/// Which regime picks split coordinates (and, for CART, positions).
struct SplitPolicy {
  PolicyKind kind = PolicyKind::PurelyRandom;
  /// Independent second sample; only set for SecondSampleGuided.
  std::shared_ptr<const Dataset> split_sample;

  static SplitPolicy purely_random() { return {}; }
  static SplitPolicy guided(Dataset sample);
  static SplitPolicy cart() { return {PolicyKind::CartEmpirical, nullptr}; }
};

struct ForestConfig {
  std::size_t k_n = 2;       // leaf-count parameter; trees get ceil(log2 k_n) levels
  std::size_t trees = 1;     // M
  SplitPolicy policy;
  SplitProbabilities probs;  // purely random mode; empty means uniform
  std::size_t m_try = 1;     // candidates per node (guided / CART)
  std::uint64_t seed = 0;
  std::size_t target_leaves = 0;  // CART mode; 0 means ceil(n/5)
  bool with_replacement = true;   // candidate sampling in guided mode

  /// Throws ConfigError / DimensionError if unusable with data of dimension d.
  void validate(std::size_t d) const;
};

/// ceil(log2 k) for k >= 1.
unsigned ceil_log2(std::size_t k) noexcept;

struct SplitDecision {
  std::size_t coordinate = 0;  // 0-based
  double position = 0.0;
  double decrease = 0.0;  // within-node sum-of-squares decrease
};

struct TreeNode {
  std::int32_t coordinate = -1;  // -1 marks a leaf
  double threshold = 0.0;        // x[coordinate] < threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf = -1;  // index into the leaf list, leaves only
};

/// Binary partition of [0,1]^d. Node 0 is the root.
class RandomTree {
 public:
  RandomTree() = default;
  RandomTree(std::size_t dim, std::vector<TreeNode> nodes);

  std::size_t d() const noexcept { return d_; }
  std::size_t leaf_count() const noexcept { return leaf_count_; }
  std::size_t depth() const noexcept { return depth_; }
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  /// Per-coordinate number of internal nodes splitting on it.
  std::span<const std::uint32_t> split_counts() const noexcept { return split_counts_; }
  std::size_t internal_count() const noexcept { return nodes_.size() - leaf_count_; }

  /// Leaves the CART builder could not create (budget not reached).
  std::size_t leaf_shortfall = 0;

  std::size_t leaf_index(std::span<const double> x) const noexcept;
  /// K_j: splits along coordinate j on the root-to-leaf path of x.
  std::vector<std::uint32_t> path_split_counts(std::span<const double> x) const;
  Cell leaf_cell(std::size_t leaf) const;
  Cell cell_of(std::span<const double> x) const;
  /// All leaf cells, indexed by leaf number.
  std::vector<Cell> leaf_cells() const;

 private:
  std::size_t d_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> leaf_node_;
  std::vector<std::uint32_t> split_counts_;
  std::size_t leaf_count_ = 0;
  std::size_t depth_ = 0;
};

/// Draws coordinate j with probability p_j.
std::size_t choose_coordinate_random(const SplitProbabilities& probs, Rng& rng);

/// m_try indices in [0,d): i.i.d. uniform with replacement, or a uniformly
/// random subset of size m_try without replacement.
std::vector<std::size_t> sample_candidates(std::size_t d, std::size_t m_try,
                                           bool with_replacement, Rng& rng);

/// (1/S) [1 - (1 - S/d)^m_try].
double ideal_cut_probability(std::size_t S, std::size_t d, std::size_t m_try);

/// Exact ties within this relative tolerance are broken at random.
inline constexpr double kTieTolerance = 1e-12;
/// |a - b| <= kTieTolerance * max(|a|, |b|, scale). `scale` is an absolute
/// floor (callers pass the node's sum of squared responses) so that rounding
/// noise around a zero decrease still counts as a tie.
bool tied(double a, double b, double scale = 0.0) noexcept;

/// Sum-of-squares decrease of splitting `indices` at x[j] < position.
double sse_decrease(const Dataset& sample, std::span<const std::uint32_t> indices,
                    std::size_t j, double position);

/// Midpoint split maximizing the within-node sum-of-squares decrease on the
/// split sample. Duplicated candidates are evaluated once; ties (including
/// the all-empty node) are broken uniformly among distinct coordinates.
SplitDecision best_midpoint_split(const Cell& cell, std::span<const std::size_t> candidates,
                                  const Dataset& sample, Rng& rng);
SplitDecision best_midpoint_split(const Cell& cell, std::span<const std::size_t> candidates,
                                  const Dataset& sample,
                                  std::span<const std::uint32_t> in_cell, Rng& rng);

/// CART search over positions halfway between consecutive distinct sorted
/// values of each candidate coordinate. Empty if fewer than two points or no
/// candidate has two distinct values.
std::optional<SplitDecision> best_cart_split(std::span<const std::size_t> candidates,
                                             const Dataset& data,
                                             std::span<const std::uint32_t> node_points,
                                             Rng& rng);

/// Builds one tree; `rng` is the tree's private stream.
RandomTree build_tree(const ForestConfig& config, const Dataset& data, Rng& rng);

}  // namespace sparseforest
