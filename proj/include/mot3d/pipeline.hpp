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

// Ablation sweeps and bird's-eye-view plots on top of the tracker and metrics.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mot3d/calibration.hpp"
#include "mot3d/dataset.hpp"
#include "mot3d/metrics.hpp"
#include "mot3d/tracker.hpp"

namespace mot3d {

struct AblationCell {
  AffinityChoice affinity = AffinityChoice::kMahalanobis;
  double iou_threshold = 0.01;
  Matcher matcher = Matcher::kGreedy;
  bool default_covariance = false;
  bool angular_velocity = true;

  // e.g. "mahalanobis/greedy/calibrated/with-angular-velocity" or
  // "iou@0.25/hungarian/default-covariance/without-angular-velocity".
  std::string label() const;
};

struct AblationGrid {
  std::vector<AffinityChoice> affinities = {AffinityChoice::kMahalanobis, AffinityChoice::kIou};
  // Applied to every IOU cell; each value adds one IOU variant.
  std::vector<double> iou_thresholds = {0.01};
  std::vector<Matcher> matchers = {Matcher::kGreedy, Matcher::kHungarian};
  std::vector<bool> default_covariance = {false, true};
  std::vector<bool> angular_velocity = {true, false};

  std::vector<AblationCell> cells() const;
};

struct AblationRow {
  AblationCell cell;
  EvalReport report;
};

// Tracks and evaluates every cell. `calibrated` is required when any cell
// uses calibrated covariances (ConfigError otherwise). Other tracker settings
// come from `base`.
std::vector<AblationRow> run_ablation(const DetectionSet& detections,
                                      const GroundTruthSet& ground_truth,
                                      const std::optional<NoiseModel>& calibrated,
                                      const AblationGrid& grid, const TrackerConfig& base,
                                      const EvalOptions& eval, unsigned jobs = 1);

// Header plus one row per cell, in cell order.
std::string ablation_csv(const std::vector<AblationRow>& rows);

// Top-down SVG of one scene: ground truth dashed, one color per track id,
// detections (if given) in a single color, every box of every frame drawn.
// Throws ConfigError when the scene is in none of the given sets.
std::string render_bev_svg(const TrackSet* tracks, const GroundTruthSet* ground_truth,
                           const DetectionSet* detections, const std::string& scene);

}  // namespace mot3d
