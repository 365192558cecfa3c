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

#include "sparseforest/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include "sparseforest/errors.hpp"

namespace sparseforest {

SplitProbabilities::SplitProbabilities(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw ConfigError("split probabilities are empty");
  double total = 0.0;
  for (double v : p_) {
    if (!(v > 0.0 && v < 1.0))
      throw ConfigError("split probability " + std::to_string(v) + " outside (0,1)");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("split probabilities sum to " + std::to_string(total) + ", not 1");
  cumulative_.resize(p_.size());
  std::partial_sum(p_.begin(), p_.end(), cumulative_.begin());
}

SplitProbabilities SplitProbabilities::uniform(std::size_t dim) {
  if (dim < 2) throw ConfigError("uniform split probabilities need d >= 2");
  return SplitProbabilities(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::PurelyRandom: return "purely_random";
    case PolicyKind::SecondSampleGuided: return "guided";
    case PolicyKind::CartEmpirical: return "cart";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "purely_random") return PolicyKind::PurelyRandom;
  if (name == "guided") return PolicyKind::SecondSampleGuided;
  if (name == "cart") return PolicyKind::CartEmpirical;
  throw ConfigError("unknown policy '" + name + "' (purely_random, guided, cart)");
}

SplitPolicy SplitPolicy::guided(Dataset sample) {
  return {PolicyKind::SecondSampleGuided, std::make_shared<const Dataset>(std::move(sample))};
}

unsigned ceil_log2(std::size_t k) noexcept {
  unsigned levels = 0;
  while ((std::size_t{1} << levels) < k) ++levels;
  return levels;
}

void ForestConfig::validate(std::size_t d) const {
  if (d < 2) throw ConfigError("ambient dimension must be at least 2");
  if (k_n < 2) throw ConfigError("k_n must be at least 2");
  if (ceil_log2(k_n) > 30) throw ConfigError("k_n too large (more than 2^30 leaves)");
  if (trees < 1) throw ConfigError("number of trees must be at least 1");
  if (m_try < 1) throw ConfigError("m_try must be at least 1");
  switch (policy.kind) {
    case PolicyKind::PurelyRandom:
      if (!probs.empty() && probs.size() != d)
        throw DimensionError("split probabilities have length " + std::to_string(probs.size()) +
                             ", data dimension is " + std::to_string(d));
      break;
    case PolicyKind::SecondSampleGuided:
      if (!policy.split_sample) throw ConfigError("guided policy needs a split sample");
      if (policy.split_sample->d() != d)
        throw DimensionError("split sample dimension " +
                             std::to_string(policy.split_sample->d()) +
                             " differs from training dimension " + std::to_string(d));
      if (policy.split_sample->empty()) throw ConfigError("guided policy split sample is empty");
      if (!with_replacement && m_try > d)
        throw ConfigError("m_try exceeds d for sampling without replacement");
      break;
    case PolicyKind::CartEmpirical:
      if (m_try > d) throw ConfigError("m_try exceeds d for CART candidate sampling");
      break;
  }
}

// ---- RandomTree ---------------------------------------------------------------

RandomTree::RandomTree(std::size_t dim, std::vector<TreeNode> nodes)
    : d_(dim), nodes_(std::move(nodes)), split_counts_(dim, 0) {
  if (nodes_.empty()) throw ConfigError("tree without nodes");
  parent_.assign(nodes_.size(), -1);
  std::vector<std::size_t> level(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    TreeNode& node = nodes_[i];
    if (node.coordinate < 0) {
      node.leaf = static_cast<std::int32_t>(leaf_node_.size());
      leaf_node_.push_back(static_cast<std::int32_t>(i));
      continue;
    }
    if (static_cast<std::size_t>(node.coordinate) >= d_)
      throw DataError("split coordinate out of range");
    node.leaf = -1;
    ++split_counts_[static_cast<std::size_t>(node.coordinate)];
    for (auto child : {node.left, node.right}) {
      if (child <= 0 || static_cast<std::size_t>(child) >= nodes_.size() || parent_[child] != -1)
        throw DataError("malformed tree node links");
      parent_[child] = static_cast<std::int32_t>(i);
    }
  }
  // Parents precede children in every layout the builders produce, so one
  // forward pass settles the depths.
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parent_[i] < 0) throw DataError("tree node without parent");
    level[i] = level[static_cast<std::size_t>(parent_[i])] + 1;
    depth_ = std::max(depth_, level[i]);
  }
  leaf_count_ = leaf_node_.size();
}

std::size_t RandomTree::leaf_index(std::span<const double> x) const noexcept {
  std::size_t i = 0;
  while (nodes_[i].coordinate >= 0) {
    const TreeNode& node = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.coordinate)] < node.threshold
                                     ? node.left
                                     : node.right);
  }
  return static_cast<std::size_t>(nodes_[i].leaf);
}

std::vector<std::uint32_t> RandomTree::path_split_counts(std::span<const double> x) const {
  std::vector<std::uint32_t> counts(d_, 0);
  std::size_t i = 0;
  while (nodes_[i].coordinate >= 0) {
    const TreeNode& node = nodes_[i];
    const auto j = static_cast<std::size_t>(node.coordinate);
    ++counts[j];
    i = static_cast<std::size_t>(x[j] < node.threshold ? node.left : node.right);
  }
  return counts;
}

Cell RandomTree::leaf_cell(std::size_t leaf) const {
  Cell cell = Cell::unit(d_);
  auto child = leaf_node_.at(leaf);
  while (parent_[child] >= 0) {
    const TreeNode& up = nodes_[parent_[child]];
    const auto j = static_cast<std::size_t>(up.coordinate);
    if (up.left == child)
      cell.hi[j] = std::min(cell.hi[j], up.threshold);
    else
      cell.lo[j] = std::max(cell.lo[j], up.threshold);
    child = parent_[child];
  }
  return cell;
}

Cell RandomTree::cell_of(std::span<const double> x) const { return leaf_cell(leaf_index(x)); }

std::vector<Cell> RandomTree::leaf_cells() const {
  std::vector<Cell> cells;
  cells.reserve(leaf_count_);
  for (std::size_t l = 0; l < leaf_count_; ++l) cells.push_back(leaf_cell(l));
  return cells;
}

// ---- coordinate selection -----------------------------------------------------

std::size_t choose_coordinate_random(const SplitProbabilities& probs, Rng& rng) {
  const double u = rng.uniform();
  const auto& cum = probs.cumulative_;
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) return cum.size() - 1;
  return static_cast<std::size_t>(it - cum.begin());
}

std::vector<std::size_t> sample_candidates(std::size_t d, std::size_t m_try,
                                           bool with_replacement, Rng& rng) {
  if (d == 0) throw ConfigError("cannot sample candidates in dimension 0");
  if (m_try == 0) throw ConfigError("m_try must be at least 1");
  std::vector<std::size_t> out;
  if (with_replacement) {
    out.reserve(m_try);
    for (std::size_t k = 0; k < m_try; ++k) out.push_back(rng.index(d));
    return out;
  }
  if (m_try > d)
    throw ConfigError("m_try = " + std::to_string(m_try) + " exceeds d = " + std::to_string(d) +
                      " without replacement");
  out.resize(d);
  std::iota(out.begin(), out.end(), std::size_t{0});
  for (std::size_t k = 0; k < m_try; ++k) std::swap(out[k], out[k + rng.index(d - k)]);
  out.resize(m_try);
  return out;
}

double ideal_cut_probability(std::size_t S, std::size_t d, std::size_t m_try) {
  if (S == 0) throw DomainError("ideal cut probability needs S >= 1");
  if (S > d) throw DomainError("ideal cut probability needs S <= d");
  if (m_try == 0) throw DomainError("ideal cut probability needs m_try >= 1");
  const double miss = 1.0 - static_cast<double>(S) / static_cast<double>(d);
  return (1.0 - std::pow(miss, static_cast<double>(m_try))) / static_cast<double>(S);
}

// ---- split criteria -----------------------------------------------------------

bool tied(double a, double b, double scale) noexcept {
  return std::abs(a - b) <= kTieTolerance * std::max({std::abs(a), std::abs(b), scale});
}

namespace {

// n_L n_R / n (mean_L - mean_R)^2, the SSE decrease of a two-way split.
double decrease_from_sums(double n_left, double sum_left, double n_right, double sum_right) {
  if (n_left == 0.0 || n_right == 0.0) return 0.0;
  const double diff = sum_left / n_left - sum_right / n_right;
  return n_left * n_right / (n_left + n_right) * diff * diff;
}

double sum_of_squares(const Dataset& data, std::span<const std::uint32_t> indices) {
  double s = 0.0;
  for (auto i : indices) s += data.y(i) * data.y(i);
  return s;
}

std::vector<std::size_t> distinct(std::span<const std::size_t> candidates, std::size_t d) {
  if (candidates.empty()) throw ConfigError("candidate list is empty");
  std::vector<std::size_t> out(candidates.begin(), candidates.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.back() >= d) throw DimensionError("candidate coordinate out of range");
  return out;
}

}  // namespace

double sse_decrease(const Dataset& sample, std::span<const std::uint32_t> indices, std::size_t j,
                    double position) {
  double n_left = 0.0, sum_left = 0.0, n_right = 0.0, sum_right = 0.0;
  for (auto i : indices) {
    if (sample.x(i, j) < position) {
      n_left += 1.0;
      sum_left += sample.y(i);
    } else {
      n_right += 1.0;
      sum_right += sample.y(i);
    }
  }
  return decrease_from_sums(n_left, sum_left, n_right, sum_right);
}

SplitDecision best_midpoint_split(const Cell& cell, std::span<const std::size_t> candidates,
                                  const Dataset& sample, std::span<const std::uint32_t> in_cell,
                                  Rng& rng) {
  const auto coords = distinct(candidates, cell.d());
  std::vector<double> dec(coords.size());
  double best = 0.0;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    dec[k] = sse_decrease(sample, in_cell, coords[k], cell.midpoint(coords[k]));
    best = std::max(best, dec[k]);
  }
  const double scale = sum_of_squares(sample, in_cell);
  std::vector<std::size_t> winners;
  for (std::size_t k = 0; k < coords.size(); ++k)
    if (tied(dec[k], best, scale)) winners.push_back(k);
  const std::size_t pick = winners.size() == 1 ? winners[0] : winners[rng.index(winners.size())];
  return {coords[pick], cell.midpoint(coords[pick]), dec[pick]};
}

SplitDecision best_midpoint_split(const Cell& cell, std::span<const std::size_t> candidates,
                                  const Dataset& sample, Rng& rng) {
  if (sample.d() != cell.d()) throw DimensionError("split sample and cell dimensions differ");
  std::vector<std::uint32_t> in_cell;
  for (std::size_t i = 0; i < sample.n(); ++i)
    if (cell.contains(sample.row(i))) in_cell.push_back(static_cast<std::uint32_t>(i));
  return best_midpoint_split(cell, candidates, sample, in_cell, rng);
}

std::optional<SplitDecision> best_cart_split(std::span<const std::size_t> candidates,
                                             const Dataset& data,
                                             std::span<const std::uint32_t> node_points,
                                             Rng& rng) {
  if (node_points.size() < 2) return std::nullopt;
  const auto coords = distinct(candidates, data.d());
  const double scale = sum_of_squares(data, node_points);
  double total = 0.0;
  for (auto i : node_points) total += data.y(i);
  const double n = static_cast<double>(node_points.size());

  std::optional<SplitDecision> best;
  std::size_t ties = 0;
  std::vector<std::pair<double, double>> column(node_points.size());
  for (std::size_t j : coords) {
    for (std::size_t k = 0; k < node_points.size(); ++k)
      column[k] = {data.x(node_points[k], j), data.y(node_points[k])};
    std::sort(column.begin(), column.end());
    double sum_left = 0.0;
    for (std::size_t k = 1; k < column.size(); ++k) {
      sum_left += column[k - 1].second;
      const double a = column[k - 1].first;
      const double b = column[k].first;
      if (!(a < b)) continue;
      double position = a + 0.5 * (b - a);
      if (position <= a) position = b;
      const double n_left = static_cast<double>(k);
      const double dec = decrease_from_sums(n_left, sum_left, n - n_left, total - sum_left);
      if (!best || (dec > best->decrease && !tied(dec, best->decrease, scale))) {
        best = SplitDecision{j, position, dec};
        ties = 1;
      } else if (tied(dec, best->decrease, scale)) {
        // Reservoir sampling keeps each tied split with equal probability.
        ++ties;
        if (rng.index(ties) == 0) best = SplitDecision{j, position, dec};
      }
    }
  }
  return best;
}

// ---- builders -----------------------------------------------------------------

namespace {

class MidpointBuilder {
 public:
  MidpointBuilder(const ForestConfig& config, std::size_t d, Rng& rng)
      : config_(config), d_(d), rng_(rng), cell_(Cell::unit(d)) {
    if (config.policy.kind == PolicyKind::PurelyRandom)
      probs_ = config.probs.empty() ? SplitProbabilities::uniform(d) : config.probs;
  }

  RandomTree build() {
    const unsigned levels = ceil_log2(config_.k_n);
    nodes_.reserve((std::size_t{2} << levels) - 1);
    std::vector<std::uint32_t> points;
    if (config_.policy.kind == PolicyKind::SecondSampleGuided) {
      points.resize(config_.policy.split_sample->n());
      std::iota(points.begin(), points.end(), 0u);
    }
    grow(levels, points);
    return RandomTree(d_, std::move(nodes_));
  }

 private:
  std::int32_t grow(unsigned levels_left, std::span<std::uint32_t> points) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    if (levels_left == 0) return id;

    std::size_t j;
    if (config_.policy.kind == PolicyKind::PurelyRandom) {
      j = choose_coordinate_random(probs_, rng_);
    } else {
      const auto candidates = sample_candidates(d_, config_.m_try, config_.with_replacement, rng_);
      j = best_midpoint_split(cell_, candidates, *config_.policy.split_sample, points, rng_)
              .coordinate;
    }
    const double mid = cell_.midpoint(j);
    nodes_[id].coordinate = static_cast<std::int32_t>(j);
    nodes_[id].threshold = mid;

    std::span<std::uint32_t> left_points, right_points;
    if (!points.empty()) {
      const Dataset& sample = *config_.policy.split_sample;
      const auto split = std::stable_partition(
          points.begin(), points.end(), [&](std::uint32_t i) { return sample.x(i, j) < mid; });
      const auto n_left = static_cast<std::size_t>(split - points.begin());
      left_points = points.first(n_left);
      right_points = points.subspan(n_left);
    }

    const double hi = cell_.hi[j];
    cell_.hi[j] = mid;
    const auto left = grow(levels_left - 1, left_points);
    cell_.hi[j] = hi;
    const double lo = cell_.lo[j];
    cell_.lo[j] = mid;
    const auto right = grow(levels_left - 1, right_points);
    cell_.lo[j] = lo;

    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  const ForestConfig& config_;
  std::size_t d_;
  Rng& rng_;
  SplitProbabilities probs_;
  Cell cell_;
  std::vector<TreeNode> nodes_;
};

RandomTree build_cart(const ForestConfig& config, const Dataset& data, Rng& rng) {
  const std::size_t d = data.d();
  const std::size_t target =
      config.target_leaves ? config.target_leaves : std::max<std::size_t>(1, (data.n() + 4) / 5);

  std::vector<std::uint32_t> points(data.n());
  std::iota(points.begin(), points.end(), 0u);
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});

  struct Pending {
    std::size_t begin, end;
    SplitDecision split;
  };
  std::vector<TreeNode> nodes;
  std::vector<Pending> pending;  // indexed by node id
  // max-heap on decrease; earlier nodes first among equal decreases
  auto cmp = [&](std::int32_t a, std::int32_t b) {
    const double da = pending[a].split.decrease, db = pending[b].split.decrease;
    if (da != db) return da < db;
    return a > b;
  };
  std::priority_queue<std::int32_t, std::vector<std::int32_t>, decltype(cmp)> queue(cmp);

  auto open = [&](std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    pending.push_back({begin, end, {}});
    const std::span<const std::uint32_t> members(points.data() + begin, end - begin);
    const auto candidates = sample_candidates(d, config.m_try, false, rng);
    auto split = best_cart_split(candidates, data, members, rng);
    if (!split && members.size() >= 2) split = best_cart_split(all, data, members, rng);
    if (split) {
      pending[id].split = *split;
      queue.push(id);
    }
    return id;
  };

  open(0, points.size());
  std::size_t leaves = 1;
  while (leaves < target && !queue.empty()) {
    const auto id = queue.top();
    queue.pop();
    const Pending node = pending[id];
    const std::size_t j = node.split.coordinate;
    const double position = node.split.position;
    const auto mid = std::stable_partition(
        points.begin() + static_cast<std::ptrdiff_t>(node.begin),
        points.begin() + static_cast<std::ptrdiff_t>(node.end),
        [&](std::uint32_t i) { return data.x(i, j) < position; });
    const auto cut = static_cast<std::size_t>(mid - points.begin());
    nodes[id].coordinate = static_cast<std::int32_t>(j);
    nodes[id].threshold = position;
    const auto left = open(node.begin, cut);
    const auto right = open(cut, node.end);
    nodes[id].left = left;
    nodes[id].right = right;
    ++leaves;
  }
  RandomTree tree(d, std::move(nodes));
  tree.leaf_shortfall = target > leaves ? target - leaves : 0;
  return tree;
}

}  // namespace

RandomTree build_tree(const ForestConfig& config, const Dataset& data, Rng& rng) {
  config.validate(data.d());
  if (config.policy.kind == PolicyKind::CartEmpirical) {
    if (data.empty()) throw ConfigError("CART trees need a nonempty training sample");
    return build_cart(config, data, rng);
  }
  MidpointBuilder builder(config, data.d(), rng);
  return builder.build();
}

}  // namespace sparseforest
