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

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mot3d/dataset.hpp"
#include "mot3d/types.hpp"

namespace mot3d {

// Diagonal noise for one class. Array order follows StateIndex.
struct ClassNoise {
  std::array<double, kStateDim> q{};
  std::array<double, kObsDim> r{};
  std::array<double, kStateDim> sigma0{};

  CovMatrix11 process_noise() const;
  CovMatrix7 observation_noise() const;
  CovMatrix11 initial_covariance() const;

  friend bool operator==(const ClassNoise&, const ClassNoise&) = default;
};

class NoiseModel {
 public:
  NoiseModel() = default;

  // All diagonals 1 for every class (the heuristic identity baseline).
  static NoiseModel default_covariance();

  bool contains(ObjectClass cls) const { return classes_.contains(cls); }
  // Throws ConfigError for a class without a record.
  const ClassNoise& at(ObjectClass cls) const;
  void set(ObjectClass cls, const ClassNoise& noise);
  const std::map<ObjectClass, ClassNoise>& classes() const { return classes_; }

  // Checks non-negative finite diagonals and zero size process noise. Throws
  // CalibrationError.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  // Throws ParseError on schema violations.
  static NoiseModel from_json(const nlohmann::json& doc);

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  std::map<ObjectClass, ClassNoise> classes_;
};

// Ground-truth trajectory of one instance within one scene.
struct GroundTruthTrack {
  std::string scene_id;
  std::string instance_id;
  ObjectClass class_label = ObjectClass::kCar;
  std::map<std::int64_t, Observation> frames;
};

// Groups ground-truth boxes into per-instance trajectories, ordered by
// (scene_id, instance_id).
std::vector<GroundTruthTrack> to_tracks(const GroundTruthSet& gt);

struct CalibrationOptions {
  // Pool samples across classes; every class present gets the same values.
  bool pooled = false;
  // Strict 2D center distance gate for detection/ground-truth matching.
  double match_gate = 2.0;
};

// Per-class Q from second differences of ground-truth centers and yaw over
// contiguous frames. Velocity diagonals copy the position/yaw diagonals; size
// entries are zero. Throws CalibrationError naming a class with fewer than two
// second-difference samples.
std::map<ObjectClass, std::array<double, kStateDim>> estimate_process_noise(
    std::span<const GroundTruthTrack> tracks, const CalibrationOptions& options = {});

struct ObservationNoise {
  std::array<double, kObsDim> r{};
  std::array<double, kStateDim> sigma0{};
};

// Per-class R from residuals of detections matched to ground truth, and Sigma0
// = [R | velocity diagonals of Q].
std::map<ObjectClass, ObservationNoise> estimate_observation_noise(
    std::span<const GroundTruthTrack> tracks, const DetectionSet& detections,
    const std::map<ObjectClass, std::array<double, kStateDim>>& process_noise,
    const CalibrationOptions& options = {});

// Full calibration; classes need both ground truth and matched detections.
NoiseModel calibrate(const GroundTruthSet& gt, const DetectionSet& detections,
                     const CalibrationOptions& options = {});

}  // namespace mot3d
