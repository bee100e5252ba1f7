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

// Synthetic scenes with known motion and detector noise.

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mot3d/dataset.hpp"
#include "mot3d/types.hpp"

namespace mot3d::synthetic {

// Identifies the sampling algorithms below; bump when any of them changes.
inline constexpr const char* kGeneratorVersion = "mt19937_64+box-muller+knuth-poisson/v1";

// Seeded source of uniforms, normals and Poisson counts with a fixed
// algorithm (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  std::int64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct ObjectSpec {
  ObjectClass class_label = ObjectClass::kCar;
  Observation initial;
  // World-frame displacement per frame.
  std::array<double, 3> velocity{};
  double yaw_rate = 0.0;
  // When set, the horizontal velocity follows the heading with constant
  // speed |(vx, vy)|, producing curved paths for nonzero yaw rate.
  bool heading_aligned = false;
  std::int64_t first_frame = 0;
  // Number of frames; -1 lives until the end of the scene.
  std::int64_t lifespan = -1;
};

struct NoiseSpec {
  // Detection noise sigma per observed component (x, y, z, yaw, l, w, h).
  std::array<double, kObsDim> detection_sigma{};
  // Per-frame acceleration sigma on (x, y, z, yaw) displacements.
  std::array<double, 4> acceleration_sigma{};
  double p_miss = 0.0;
  // Poisson mean of false positives per frame.
  double false_positive_rate = 0.0;
  // True detections score U(tp_score_min, 1); false positives U(0, fp_score_max).
  double tp_score_min = 0.5;
  double fp_score_max = 0.5;
};

struct ScenarioSpec {
  std::string scene_id = "scene-0000";
  std::int64_t frame_count = 0;
  std::vector<ObjectSpec> objects;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  // False positives are placed uniformly in [min, max] on x and y.
  std::array<double, 2> area_min{-50.0, -50.0};
  std::array<double, 2> area_max{50.0, 50.0};

  // Throws ConfigError.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static ScenarioSpec from_json(const nlohmann::json& doc);
};

struct SyntheticData {
  GroundTruthSet ground_truth;
  DetectionSet detections;
};

// Typical (l, w, h) per class, used for false positives and presets.
std::array<double, 3> typical_size(ObjectClass cls);

// Deterministic for a given spec. Every frame in [0, frame_count) appears in
// both outputs, possibly with an empty array.
SyntheticData generate(const ScenarioSpec& spec);

// Concatenates scenes (scene ids must differ).
SyntheticData generate(std::span<const ScenarioSpec> specs);

// Metadata block for generated files.
nlohmann::ordered_json generator_meta(const ScenarioSpec& spec);

// Mixed-class noisy scenes in which pedestrians and bicycles move further per
// frame than their own box extent. `seed` selects the split.
std::vector<ScenarioSpec> standard_noisy_suite(std::uint64_t seed, int scenes = 4);

// `objects` well-separated constant-velocity cars, no noise.
ScenarioSpec noiseless_scene(int objects, std::int64_t frames, std::uint64_t seed = 0);

// A single car turning at constant yaw rate with heading-aligned velocity.
ScenarioSpec turning_scene(double yaw_rate, double speed, std::int64_t frames);

}  // namespace mot3d::synthetic
