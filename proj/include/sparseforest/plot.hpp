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

#include <filesystem>
#include <string>
#include <vector>

namespace sparseforest::plot {

struct Box {
  std::string label;
  std::vector<double> values;
};

/// Tukey boxplots (whiskers at 1.5 IQR, outliers as points) written as SVG.
void boxplot_svg(const std::string& title, const std::string& y_label,
                 const std::vector<Box>& boxes, const std::filesystem::path& path);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
};

/// Line chart with optional log10 x axis, written as SVG.
void line_chart_svg(const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series,
                    bool log_x, const std::filesystem::path& path);

}  // namespace sparseforest::plot
