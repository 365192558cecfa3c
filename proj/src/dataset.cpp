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

#include "sparseforest/dataset.hpp"

#include <fstream>
#include <string>

#include "sparseforest/csv.hpp"
#include "sparseforest/errors.hpp"

namespace sparseforest {

bool in_unit_cube(std::span<const double> point) noexcept {
  for (double v : point)
    if (!(v >= 0.0 && v <= 1.0)) return false;
  return true;
}

Dataset::Dataset(std::vector<double> x, std::vector<double> y, std::size_t dim)
    : d_(dim), x_(std::move(x)), y_(std::move(y)) {
  if (d_ == 0) throw ConfigError("dataset dimension must be positive");
  if (x_.size() != y_.size() * d_)
    throw DimensionError("covariate matrix has " + std::to_string(x_.size()) +
                         " entries, expected n*d = " + std::to_string(y_.size() * d_));
  if (!in_unit_cube(x_)) throw ConfigError("covariates must lie in [0,1]");
}

void Dataset::push_back(std::span<const double> row, double response) {
  if (row.size() != d_)
    throw DimensionError("row of length " + std::to_string(row.size()) + " in dimension " +
                         std::to_string(d_));
  if (!in_unit_cube(row)) throw ConfigError("covariates must lie in [0,1]");
  x_.insert(x_.end(), row.begin(), row.end());
  y_.push_back(response);
}

Dataset Dataset::with_response(std::vector<double> y) const {
  if (y.size() != y_.size()) throw DimensionError("response length mismatch");
  Dataset out(d_);
  out.x_ = x_;
  out.y_ = std::move(y);
  return out;
}

Cell Cell::unit(std::size_t dim) {
  return Cell{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

bool Cell::contains(std::span<const double> point) const noexcept {
  for (std::size_t j = 0; j < lo.size(); ++j) {
    const double v = point[j];
    if (v < lo[j]) return false;
    if (v >= hi[j] && !(hi[j] == 1.0 && v == 1.0)) return false;
  }
  return true;
}

double Cell::measure() const noexcept {
  double m = 1.0;
  for (std::size_t j = 0; j < lo.size(); ++j) m *= hi[j] - lo[j];
  return m;
}

std::size_t count_in_cell(const Dataset& data, const Cell& cell) {
  if (data.empty()) return 0;
  if (cell.d() != data.d()) throw DimensionError("cell and dataset dimensions differ");
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (cell.contains(data.row(i))) ++count;
  return count;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<std::string> fields;
  for (std::size_t j = 0; j < data.d(); ++j) fields.push_back("x" + std::to_string(j + 1));
  fields.emplace_back("y");
  csv::write_row(out, fields);
  for (std::size_t i = 0; i < data.n(); ++i) {
    fields.clear();
    for (double v : data.row(i)) fields.push_back(csv::format_double(v));
    fields.push_back(csv::format_double(data.y(i)));
    csv::write_row(out, fields);
  }
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  const csv::Table t = csv::read(in);
  if (t.header.size() < 2 || t.header.back() != "y")
    throw DataError(path.string() + ": header must be x1,...,xd,y");
  const std::size_t d = t.header.size() - 1;
  for (std::size_t j = 0; j < d; ++j)
    if (t.header[j] != "x" + std::to_string(j + 1))
      throw DataError(path.string() + ": unexpected column '" + t.header[j] + "'");
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(t.rows.size() * d);
  y.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < d; ++j) x.push_back(csv::parse_double(row[j]));
    y.push_back(csv::parse_double(row[d]));
  }
  try {
    return Dataset(std::move(x), std::move(y), d);
  } catch (const ConfigError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace sparseforest
