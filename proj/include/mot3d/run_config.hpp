// Copyright 2026 The mot3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mot3d/tracker.hpp"

namespace mot3d {

// Everything a run needs besides the input files. JSON keys:
//   matcher ("greedy" | "hungarian"), affinity ("mahalanobis" | "iou"),
//   maha_threshold, class_maha_thresholds {class: gate}, iou_threshold,
//   angular_velocity, birth_hits, death_misses, warmup_output,
//   amota_samples, noise_model (path), default_covariance.
struct RunConfig {
  TrackerConfig tracker;
  int amota_samples = 40;
  std::optional<std::filesystem::path> noise_model_path;
  bool default_covariance = false;

  // Throws ConfigError.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  // Unknown keys and bad enumerations raise ConfigError.
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig load(const std::filesystem::path& path);
};

Matcher parse_matcher(const std::string& name);
AffinityChoice parse_affinity(const std::string& name);

}  // namespace mot3d
