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

// Detection, ground-truth and track files.
//
// All three share one layout: a JSON object mapping scene_id to an object
// mapping frame_index (decimal string) to an array of box records
//
//   {"center": [x, y, z], "yaw": a, "size": [l, w, h], "class": "car",
//    "score": s,            // detections and tracks
//    "instance_id": "...",  // ground truth (string or integer)
//    "track_id": 7}         // tracks
//
// The top-level key "_meta" is reserved for producer metadata and is not a
// scene. Yaw is a single radian angle about +z; sources that carry quaternions
// must convert with yaw = atan2(2(wz + xy), 1 - 2(y^2 + z^2)) beforehand.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mot3d/types.hpp"

namespace mot3d {

using FrameIndex = std::int64_t;

template <typename Record>
using SceneFrames = std::map<std::string, std::map<FrameIndex, std::vector<Record>>>;

struct GroundTruthBox {
  Observation box;
  ObjectClass class_label = ObjectClass::kCar;
  std::string instance_id;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

struct TrackRecord {
  std::int64_t track_id = 0;
  ObjectClass class_label = ObjectClass::kCar;
  Observation box;
  double score = 0.0;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

using DetectionSet = SceneFrames<Detection>;
using GroundTruthSet = SceneFrames<GroundTruthBox>;
using TrackSet = SceneFrames<TrackRecord>;

inline constexpr const char* kMetaKey = "_meta";

// Parsers throw ParseError naming scene, frame and record index.
DetectionSet parse_detections(const nlohmann::json& doc);
GroundTruthSet parse_ground_truth(const nlohmann::json& doc);
TrackSet parse_tracks(const nlohmann::json& doc);

// Reads and parses; IoError when the file cannot be opened, ParseError when it
// is not valid JSON or violates the schema.
nlohmann::json read_json(const std::filesystem::path& path);
DetectionSet load_detections(const std::filesystem::path& path);
GroundTruthSet load_ground_truth(const std::filesystem::path& path);
TrackSet load_tracks(const std::filesystem::path& path);

// Serialized documents keep scenes sorted and frames in ascending numeric
// order; output is byte-stable for equal inputs. `meta`, if not null, is
// written under "_meta".
nlohmann::ordered_json to_json(const DetectionSet& set, const nlohmann::ordered_json& meta = nullptr);
nlohmann::ordered_json to_json(const GroundTruthSet& set, const nlohmann::ordered_json& meta = nullptr);
nlohmann::ordered_json to_json(const TrackSet& set, const nlohmann::ordered_json& meta = nullptr);

// Writes `doc` with a trailing newline. Throws IoError.
void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

void write_detections(const DetectionSet& set, const std::filesystem::path& path,
                      const nlohmann::ordered_json& meta = nullptr);
void write_ground_truth(const GroundTruthSet& set, const std::filesystem::path& path,
                        const nlohmann::ordered_json& meta = nullptr);
void write_tracks(const TrackSet& set, const std::filesystem::path& path,
                  const nlohmann::ordered_json& meta = nullptr);

}  // namespace mot3d
