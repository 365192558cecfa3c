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
#include <filesystem>
#include <span>
#include <vector>

namespace sparseforest {

/// Training sample: n rows of covariates in [0,1]^d plus a response vector.
/// Covariates are stored row-major.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim) : d_(dim) {}
  /// Validates that x has n*d entries in [0,1] and y has n entries.
  Dataset(std::vector<double> x, std::vector<double> y, std::size_t dim);

  std::size_t n() const noexcept { return y_.size(); }
  std::size_t d() const noexcept { return d_; }
  bool empty() const noexcept { return y_.empty(); }

  std::span<const double> row(std::size_t i) const noexcept {
    return {x_.data() + i * d_, d_};
  }
  double x(std::size_t i, std::size_t j) const noexcept { return x_[i * d_ + j]; }
  double y(std::size_t i) const noexcept { return y_[i]; }

  std::span<const double> xs() const noexcept { return x_; }
  std::span<const double> ys() const noexcept { return y_; }

  /// Appends one row; throws DimensionError / ConfigError on bad input.
  void push_back(std::span<const double> row, double response);

  /// Copy with the response vector replaced (same covariates).
  Dataset with_response(std::vector<double> y) const;

 private:
  std::size_t d_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Axis-aligned rectangle prod_j [lo_j, hi_j). A face at hi_j == 1 is closed so
/// that every point of [0,1]^d belongs to exactly one leaf.
struct Cell {
  std::vector<double> lo;
  std::vector<double> hi;

  static Cell unit(std::size_t dim);

  std::size_t d() const noexcept { return lo.size(); }
  bool contains(std::span<const double> point) const noexcept;
  double measure() const noexcept;
  double side(std::size_t j) const noexcept { return hi[j] - lo[j]; }
  double midpoint(std::size_t j) const noexcept { return 0.5 * (lo[j] + hi[j]); }
};

bool in_unit_cube(std::span<const double> point) noexcept;

/// Number of rows of data lying in the cell.
std::size_t count_in_cell(const Dataset& data, const Cell& cell);

/// CSV with header `x1,...,xd,y`. Doubles are written in shortest round-trip form.
void write_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_csv(const std::filesystem::path& path);

}  // namespace sparseforest
