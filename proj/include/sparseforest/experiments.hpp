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
#include <string>
#include <vector>

#include "sparseforest/models.hpp"
#include "sparseforest/tree.hpp"

namespace sparseforest {

/// One grid experiment: models x n_values x d_values x replicates.
struct ExperimentSpec {
  SyntheticModel model;  // model.d is overridden by each entry of d_values
  std::vector<std::size_t> d_values{10, 25, 100};
  std::vector<std::size_t> n_values{10, 50, 100, 500, 1000};
  std::size_t replicates = 20;
  std::size_t trees = 500;
  std::size_t test_size = 5000;
  PolicyKind policy = PolicyKind::SecondSampleGuided;
  std::size_t m_try = 0;  // 0: automatic (see resolved_m_try)
  std::size_t k_n = 0;    // 0: automatic (see resolved_k_n)
  std::uint64_t seed = 1;

  void validate() const;
  /// Cut-probability runs use m_try = d; MSE runs use max(floor(d/3), 1)
  /// for CART and d otherwise.
  std::size_t resolved_m_try(std::size_t d, bool cut_probability) const;
  /// Guided and purely random trees: max(2, ceil(sqrt(n))) for
  /// cut-probability runs, max(2, ceil(n/5)) for MSE runs.
  std::size_t resolved_k_n(std::size_t n, bool cut_probability) const;
};

struct CutProbabilityRow {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t replicate = 0;
  std::size_t coordinate = 0;  // 1-based
  double ratio = 0.0;
};

/// Share of all forest splits that fall on each coordinate, per replicate.
struct CutProbabilityTable {
  std::vector<CutProbabilityRow> rows;  // sorted by (n, d, replicate, coordinate)
  std::vector<std::string> warnings;

  /// Mean ratio of `coordinate` (1-based) over the replicates of (n, d).
  double mean_ratio(std::size_t n, std::size_t d, std::size_t coordinate) const;
  std::vector<double> ratios(std::size_t n, std::size_t d, std::size_t coordinate) const;
};

struct MsePoint {
  std::string model;
  std::size_t n = 0;
  std::size_t d = 0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  std::size_t replicates = 0;
};

struct MseCurve {
  std::vector<MsePoint> points;  // sorted by (d, n)
  const MsePoint& at(std::size_t n, std::size_t d) const;
};

CutProbabilityTable run_cut_probability(const ExperimentSpec& spec, unsigned threads = 1);
MseCurve run_mse_curve(const ExperimentSpec& spec, unsigned threads = 1);

/// 0.75 / (S log 2 + 0.75).
double rate_exponent(std::size_t S);
/// 2 / (dim + 2).
double minimax_exponent(std::size_t dim);
/// 1 / (1 + 0.75 / (S log 2)).
double kn_exponent(std::size_t S);
/// round((L^2/Xi)^e n^e) with e = kn_exponent(S), at least 2.
std::size_t optimal_kn(std::size_t n, std::size_t S, double L, double Xi);
/// rate_exponent(S) > minimax_exponent(d).
bool sparse_rate_wins(std::size_t S, std::size_t d);
/// S <= floor(0.54 d), the rule of thumb for sparse_rate_wins.
bool sparsity_rule(std::size_t S, std::size_t d);

void write_cut_probs_csv(const CutProbabilityTable& table, const std::filesystem::path& path);
CutProbabilityTable read_cut_probs_csv(const std::filesystem::path& path);
void write_mse_curve_csv(const MseCurve& curve, const std::filesystem::path& path);
MseCurve read_mse_curve_csv(const std::filesystem::path& path);

/// Boxplot per coordinate (first `max_coordinates`) for each (n, d).
std::vector<std::filesystem::path> plot_cut_probs(const CutProbabilityTable& table,
                                                  const std::filesystem::path& dir,
                                                  std::size_t max_coordinates = 20);
/// One chart per d: MSE against n with stderr bars.
std::vector<std::filesystem::path> plot_mse_curve(const MseCurve& curve,
                                                  const std::filesystem::path& dir);

}  // namespace sparseforest
