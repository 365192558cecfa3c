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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sparseforest/dataset.hpp"
#include "sparseforest/rng.hpp"

namespace sparseforest {

enum class ModelKind {
  Sinus,       // 10 sin(10 pi x1)
  Friedman1,   // 10 sin(pi x1 x2) + 20 (x3 - c)^2 + 10 x4 + 5 x5
  Tree,        // fixed depth-3 piecewise-constant tree on x1..x5
  SinusLinear, // 10 sin(10 pi x1) + x2, two strong coordinates
  Constant,    // level, no strong coordinate
};

/// Fixed regression tree used by ModelKind::Tree. Thresholds are dyadic.
/// Node k has children 2k+1, 2k+2; nodes 0..6 are internal, leaves follow
/// in left-to-right order.
struct TreeModelSpec {
  static constexpr const char* version = "tree-model-v1";
  static constexpr std::array<int, 7> coordinate{0, 1, 2, 3, 4, 3, 4};
  static constexpr std::array<double, 7> threshold{0.5, 0.5, 0.5, 0.25, 0.75, 0.5, 0.25};
  static constexpr std::array<double, 8> leaf_value{-10.0, -4.0, 2.0, 7.0, -7.0, 4.0, 10.0, -1.0};
};

struct SyntheticModel {
  ModelKind kind = ModelKind::Sinus;
  std::size_t d = 1;
  double noise_sd = 1.0;
  double friedman_center = 0.05;  // the classical Friedman #1 uses 0.5
  double level = 0.0;             // Constant only

  static SyntheticModel sinus(std::size_t d, double noise_sd = 1.0);
  static SyntheticModel friedman1(std::size_t d, double center = 0.05, double noise_sd = 1.0);
  static SyntheticModel tree(std::size_t d, double noise_sd = 1.0);
  static SyntheticModel sinus_linear(std::size_t d, double noise_sd = 1.0);
  static SyntheticModel constant(std::size_t d, double level, double noise_sd = 0.0);

  /// Throws ConfigError when d is below the model's minimum dimension.
  void validate() const;
  std::string name() const;
  /// 0-based indices of the strong coordinates.
  std::vector<std::size_t> strong() const;
  std::size_t sparsity() const { return strong().size(); }
  /// Lipschitz constant of the section r* (Euclidean norm on the strong set).
  double lipschitz() const;
  /// sup_x r(x)^2.
  double sup_square() const;
};

ModelKind model_from_string(const std::string& name);
std::string to_string(ModelKind kind);

double truth(const SyntheticModel& model, std::span<const double> x);

/// n rows with X ~ U([0,1]^d) and Y = r(X) + noise_sd * N(0,1).
Dataset generate(const SyntheticModel& model, std::size_t n, Rng& rng);

/// n uniform points in [0,1]^d with y = truth (noiseless), for test sets.
Dataset generate_noiseless(const SyntheticModel& model, std::size_t n, Rng& rng);

}  // namespace sparseforest
