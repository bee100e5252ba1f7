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

#include "mot3d/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mot3d/errors.hpp"

namespace mot3d {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Location {
  const std::string& scene;
  const std::string& frame;
  std::size_t record;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("scene '" + scene + "' frame '" + frame + "' record " +
                     std::to_string(record) + ": " + what);
  }
};

double finite_number(const json& v, const char* field, const Location& loc) {
  if (!v.is_number()) loc.fail(std::string(field) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) loc.fail(std::string(field) + " must be finite");
  return d;
}

const json& member(const json& rec, const char* field, const Location& loc) {
  const auto it = rec.find(field);
  if (it == rec.end()) loc.fail(std::string("missing field '") + field + "'");
  return *it;
}

std::array<double, 3> triple(const json& rec, const char* field, const Location& loc) {
  const json& v = member(rec, field, loc);
  if (!v.is_array() || v.size() != 3) loc.fail(std::string(field) + " must be an array of 3 numbers");
  return {finite_number(v[0], field, loc), finite_number(v[1], field, loc),
          finite_number(v[2], field, loc)};
}

Observation parse_box(const json& rec, const Location& loc) {
  if (!rec.is_object()) loc.fail("record must be an object");
  const auto c = triple(rec, "center", loc);
  const auto s = triple(rec, "size", loc);
  if (!(s[0] > 0.0 && s[1] > 0.0 && s[2] > 0.0)) loc.fail("size entries must be positive");
  const double yaw = finite_number(member(rec, "yaw", loc), "yaw", loc);
  return Observation{c[0], c[1], c[2], wrap_angle(yaw), s[0], s[1], s[2]};
}

ObjectClass parse_class_field(const json& rec, const Location& loc) {
  const json& v = member(rec, "class", loc);
  if (!v.is_string()) loc.fail("class must be a string");
  const auto cls = parse_class(v.get<std::string>());
  if (!cls) loc.fail("unknown class '" + v.get<std::string>() + "'");
  return *cls;
}

double parse_score(const json& rec, const Location& loc) {
  const double s = finite_number(member(rec, "score", loc), "score", loc);
  if (s < 0.0 || s > 1.0) loc.fail("score must be in [0, 1]");
  return s;
}

FrameIndex parse_frame_key(const std::string& scene, const std::string& key) {
  FrameIndex value = -1;
  const char* first = key.data();
  const char* last = key.data() + key.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (key.empty() || ec != std::errc() || ptr != last || value < 0) {
    throw ParseError("scene '" + scene + "': frame key '" + key +
                     "' is not a non-negative integer");
  }
  return value;
}

// Walks scene -> frame -> records, handing each record to `fn`.
template <typename Record, typename Fn>
SceneFrames<Record> parse_layout(const json& doc, Fn&& fn) {
  if (!doc.is_object()) throw ParseError("top level must be an object of scenes");
  SceneFrames<Record> out;
  for (const auto& [scene, frames] : doc.items()) {
    if (scene == kMetaKey) continue;
    if (!frames.is_object()) throw ParseError("scene '" + scene + "' must map frames to arrays");
    auto& scene_out = out[scene];
    for (const auto& [frame_key, records] : frames.items()) {
      const FrameIndex frame = parse_frame_key(scene, frame_key);
      if (!records.is_array()) {
        throw ParseError("scene '" + scene + "' frame '" + frame_key + "' must be an array");
      }
      if (scene_out.contains(frame)) {
        throw ParseError("scene '" + scene + "': duplicate frame " + std::to_string(frame));
      }
      auto& frame_out = scene_out[frame];
      frame_out.reserve(records.size());
      for (std::size_t i = 0; i < records.size(); ++i) {
        const Location loc{scene, frame_key, i};
        frame_out.push_back(fn(records[i], scene, frame, loc));
      }
    }
  }
  return out;
}

ordered_json box_json(const Observation& b, ObjectClass cls) {
  ordered_json rec;
  rec["center"] = {b.x, b.y, b.z};
  rec["yaw"] = b.yaw;
  rec["size"] = {b.length, b.width, b.height};
  rec["class"] = std::string(to_string(cls));
  return rec;
}

template <typename Record, typename Fn>
ordered_json write_layout(const SceneFrames<Record>& set, const ordered_json& meta, Fn&& fn) {
  ordered_json doc = ordered_json::object();
  if (!meta.is_null()) doc[kMetaKey] = meta;
  for (const auto& [scene, frames] : set) {
    ordered_json scene_doc = ordered_json::object();
    for (const auto& [frame, records] : frames) {
      ordered_json arr = ordered_json::array();
      for (const auto& r : records) arr.push_back(fn(r));
      scene_doc[std::to_string(frame)] = std::move(arr);
    }
    doc[scene] = std::move(scene_doc);
  }
  return doc;
}

}  // namespace

DetectionSet parse_detections(const json& doc) {
  return parse_layout<Detection>(
      doc, [](const json& rec, const std::string& scene, FrameIndex frame, const Location& loc) {
        Detection d;
        d.observation = parse_box(rec, loc);
        d.class_label = parse_class_field(rec, loc);
        d.score = parse_score(rec, loc);
        d.frame_index = frame;
        d.scene_id = scene;
        return d;
      });
}

GroundTruthSet parse_ground_truth(const json& doc) {
  return parse_layout<GroundTruthBox>(
      doc, [](const json& rec, const std::string&, FrameIndex, const Location& loc) {
        GroundTruthBox g;
        g.box = parse_box(rec, loc);
        g.class_label = parse_class_field(rec, loc);
        const json& id = member(rec, "instance_id", loc);
        if (id.is_string()) {
          g.instance_id = id.get<std::string>();
        } else if (id.is_number_integer()) {
          g.instance_id = std::to_string(id.get<std::int64_t>());
        } else {
          loc.fail("instance_id must be a string or integer");
        }
        return g;
      });
}

TrackSet parse_tracks(const json& doc) {
  return parse_layout<TrackRecord>(
      doc, [](const json& rec, const std::string&, FrameIndex, const Location& loc) {
        TrackRecord t;
        t.box = parse_box(rec, loc);
        t.class_label = parse_class_field(rec, loc);
        t.score = parse_score(rec, loc);
        const json& id = member(rec, "track_id", loc);
        if (!id.is_number_integer()) loc.fail("track_id must be an integer");
        t.track_id = id.get<std::int64_t>();
        return t;
      });
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // A blank file is an empty set.
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

DetectionSet load_detections(const std::filesystem::path& path) {
  return parse_detections(read_json(path));
}

GroundTruthSet load_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(read_json(path));
}

TrackSet load_tracks(const std::filesystem::path& path) { return parse_tracks(read_json(path)); }

ordered_json to_json(const DetectionSet& set, const ordered_json& meta) {
  return write_layout(set, meta, [](const Detection& d) {
    ordered_json rec = box_json(d.observation, d.class_label);
    rec["score"] = d.score;
    return rec;
  });
}

ordered_json to_json(const GroundTruthSet& set, const ordered_json& meta) {
  return write_layout(set, meta, [](const GroundTruthBox& g) {
    ordered_json rec = box_json(g.box, g.class_label);
    rec["instance_id"] = g.instance_id;
    return rec;
  });
}

ordered_json to_json(const TrackSet& set, const ordered_json& meta) {
  return write_layout(set, meta, [](const TrackRecord& t) {
    ordered_json rec = box_json(t.box, t.class_label);
    rec["score"] = t.score;
    rec["track_id"] = t.track_id;
    return rec;
  });
}

void write_json(const ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(1, '\t') << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_detections(const DetectionSet& set, const std::filesystem::path& path,
                      const ordered_json& meta) {
  write_json(to_json(set, meta), path);
}

void write_ground_truth(const GroundTruthSet& set, const std::filesystem::path& path,
                        const ordered_json& meta) {
  write_json(to_json(set, meta), path);
}

void write_tracks(const TrackSet& set, const std::filesystem::path& path,
                  const ordered_json& meta) {
  write_json(to_json(set, meta), path);
}

}  // namespace mot3d
