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

#include <json.hpp>

#include "sparseforest/experiments.hpp"
#include "sparseforest/models.hpp"
#include "sparseforest/theory.hpp"
#include "sparseforest/tree.hpp"

namespace sparseforest::config {

inline constexpr const char* kVersion = "sparseforest 1.0.0";

/// Parses a JSON file; throws ConfigError on syntax errors or missing file.
/// A manifest written by write_manifest is unwrapped to its "config" object.
nlohmann::json load(const std::filesystem::path& path);

/// {"name": "sinus", "d": 10, "noise_sd": 1.0, "friedman_center": 0.05}
SyntheticModel model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticModel& model);

/// ExperimentSpec fields by name; unknown keys are rejected.
ExperimentSpec experiment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);

/// Forest settings; "policy": "guided" needs a split sample supplied separately.
/// Keys listed in `extra` are skipped instead of rejected.
ForestConfig forest_from_json(const nlohmann::json& j,
                              std::initializer_list<const char*> extra = {});
nlohmann::json to_json(const ForestConfig& config);

theory::SuiteOptions suite_from_json(const nlohmann::json& j);
nlohmann::json to_json(const theory::SuiteOptions& options);

/// Manifest = the full resolved configuration, the command and the code
/// version. Feeding it back through --config replays the run.
void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const nlohmann::json& resolved);

}  // namespace sparseforest::config
