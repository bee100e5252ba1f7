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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mot3d/association.hpp"
#include "mot3d/calibration.hpp"
#include "mot3d/dataset.hpp"
#include "mot3d/kalman.hpp"
#include "mot3d/types.hpp"

namespace mot3d {

enum class Matcher { kGreedy, kHungarian };
enum class AffinityChoice { kMahalanobis, kIou };

std::string_view to_string(Matcher m);
std::string_view to_string(AffinityChoice a);

struct TrackerConfig {
  Matcher matcher = Matcher::kGreedy;
  AffinityChoice affinity = AffinityChoice::kMahalanobis;
  // Mahalanobis gate; per-class entries override it.
  double maha_threshold = kDefaultMahalanobisGate;
  std::map<ObjectClass, double> class_maha_thresholds;
  // Minimum IOU for an IOU-based match.
  double iou_threshold = 0.01;
  // When false the yaw rate is pinned to zero along with its noise.
  bool angular_velocity = true;
  int birth_hits = 3;
  int death_misses = 2;
  // During the first `birth_hits` frames of a scene, tentative tracks are
  // reported as well, so objects present at the start are not lost before they
  // can possibly be confirmed.
  bool warmup_output = true;

  double gate_for(ObjectClass cls) const;
  // Throws ConfigError.
  void validate() const;
};

enum class TrackStatus { kTentative, kConfirmed, kDead };

struct Track {
  std::int64_t track_id = 0;
  ObjectClass class_label = ObjectClass::kCar;
  StateEstimate estimate;
  int consecutive_hits = 0;
  int consecutive_misses = 0;
  TrackStatus status = TrackStatus::kTentative;
  double last_score = 0.0;
};

struct OutputRecord {
  std::int64_t track_id = 0;
  ObjectClass class_label = ObjectClass::kCar;
  StateVector state;
  double score = 0.0;
};

struct FrameOutput {
  FrameIndex frame_index = 0;
  std::vector<OutputRecord> records;
};

struct TrackerStats {
  std::int64_t born = 0;
  std::int64_t confirmed = 0;
  std::int64_t died = 0;
};

// Tracking state machine for one scene. Not safe for concurrent use; separate
// scenes use separate instances.
class Tracker {
 public:
  Tracker(NoiseModel noise, TrackerConfig config);

  // Processes one frame. Every detection must carry `frame_index`, which must
  // exceed the previous frame's (SequencingError otherwise). Detections of a
  // class missing from the noise model raise ConfigError.
  FrameOutput step(FrameIndex frame_index, std::span<const Detection> detections);

  // Live tracks in spawn order.
  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerStats& stats() const { return stats_; }
  const TrackerConfig& config() const { return config_; }

 private:
  void step_class(ObjectClass cls, std::span<const Detection* const> detections);
  StateEstimate initial_estimate(const Detection& det) const;
  CovMatrix11 process_noise(ObjectClass cls) const;

  NoiseModel noise_;
  TrackerConfig config_;
  std::vector<Track> tracks_;
  std::int64_t next_id_ = 1;
  std::optional<FrameIndex> last_frame_;
  std::int64_t frames_seen_ = 0;
  TrackerStats stats_;
};

struct SceneResult {
  std::vector<FrameOutput> frames;
  TrackerStats stats;
};

// Runs a fresh Tracker over one scene's frames (ascending). Gaps between frame
// indices are stepped as empty frames so prediction stays one step per frame.
SceneResult run_scene(const std::map<FrameIndex, std::vector<Detection>>& frames,
                      const NoiseModel& noise, const TrackerConfig& config);

// Same, with frames in caller order; throws SequencingError on non-ascending
// frame indices.
SceneResult run_scene(std::span<const std::pair<FrameIndex, std::vector<Detection>>> frames,
                      const NoiseModel& noise, const TrackerConfig& config);

struct TrackingRun {
  std::map<std::string, SceneResult> scenes;
  TrackSet tracks;
};

// All scenes, on up to `jobs` worker threads (0: hardware concurrency). The
// result does not depend on `jobs`.
TrackingRun track_all(const DetectionSet& detections, const NoiseModel& noise,
                      const TrackerConfig& config, unsigned jobs = 1);

TrackRecord to_track_record(const OutputRecord& record);

}  // namespace mot3d
