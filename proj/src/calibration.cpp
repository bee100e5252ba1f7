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

#include "mot3d/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

#include "mot3d/association.hpp"
#include "mot3d/errors.hpp"

namespace mot3d {

namespace {

constexpr const char* kFormat = "mot3d-noise-model/1";
constexpr std::array<const char*, kStateDim> kStateFields = {
    "x", "y", "z", "a", "l", "w", "h", "dx", "dy", "dz", "da"};
constexpr std::array<const char*, kObsDim> kObsFields = {"x", "y", "z", "a", "l", "w", "h"};

// Population variance, two-pass.
double variance(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double acc = 0.0;
  for (double s : samples) acc += (s - mean) * (s - mean);
  return acc / static_cast<double>(samples.size());
}

template <std::size_t N>
struct Samples {
  std::array<std::vector<double>, N> components;
  std::size_t size() const { return components[0].size(); }
  void append(const Samples& other) {
    for (std::size_t k = 0; k < N; ++k) {
      components[k].insert(components[k].end(), other.components[k].begin(),
                           other.components[k].end());
    }
  }
};

std::vector<const GroundTruthTrack*> sorted_tracks(std::span<const GroundTruthTrack> tracks) {
  std::vector<const GroundTruthTrack*> out;
  out.reserve(tracks.size());
  for (const auto& t : tracks) out.push_back(&t);
  std::stable_sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
    return std::tie(a->scene_id, a->instance_id) < std::tie(b->scene_id, b->instance_id);
  });
  return out;
}

template <std::size_t N>
std::map<ObjectClass, Samples<N>> pool_if_requested(std::map<ObjectClass, Samples<N>> by_class,
                                                    bool pooled) {
  if (!pooled || by_class.empty()) return by_class;
  Samples<N> all;
  for (const auto& [cls, s] : by_class) all.append(s);
  for (auto& [cls, s] : by_class) s = all;
  return by_class;
}

template <std::size_t N>
std::array<double, N> diag_from(const nlohmann::json& v, std::string_view cls, const char* field) {
  if (!v.is_array() || v.size() != N) {
    throw ParseError("noise model: class '" + std::string(cls) + "' field " + field +
                     " must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) {
      throw ParseError("noise model: class '" + std::string(cls) + "' field " + field +
                       " entry " + std::to_string(i) + " is not a number");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

CovMatrix11 ClassNoise::process_noise() const {
  return Eigen::Map<const Vector11>(q.data()).asDiagonal();
}

CovMatrix7 ClassNoise::observation_noise() const {
  return Eigen::Map<const Vector7>(r.data()).asDiagonal();
}

CovMatrix11 ClassNoise::initial_covariance() const {
  return Eigen::Map<const Vector11>(sigma0.data()).asDiagonal();
}

NoiseModel NoiseModel::default_covariance() {
  NoiseModel m;
  ClassNoise unit;
  unit.q.fill(1.0);
  unit.r.fill(1.0);
  unit.sigma0.fill(1.0);
  for (ObjectClass cls : kAllClasses) m.set(cls, unit);
  return m;
}

const ClassNoise& NoiseModel::at(ObjectClass cls) const {
  const auto it = classes_.find(cls);
  if (it == classes_.end()) {
    throw ConfigError("noise model has no entry for class '" + std::string(to_string(cls)) + "'");
  }
  return it->second;
}

void NoiseModel::set(ObjectClass cls, const ClassNoise& noise) { classes_[cls] = noise; }

void NoiseModel::validate() const {
  auto check = [](std::string_view cls, const char* field, std::span<const double> values) {
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw CalibrationError("noise model: class '" + std::string(cls) + "' field " + field +
                               " has a negative or non-finite diagonal");
      }
    }
  };
  for (const auto& [cls, n] : classes_) {
    check(to_string(cls), "Q", n.q);
    check(to_string(cls), "R", n.r);
    check(to_string(cls), "Sigma0", n.sigma0);
  }
}

nlohmann::ordered_json NoiseModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["state_fields"] = kStateFields;
  doc["observation_fields"] = kObsFields;
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& [cls, n] : classes_) {
    nlohmann::ordered_json rec;
    rec["Q"] = n.q;
    rec["R"] = n.r;
    rec["Sigma0"] = n.sigma0;
    classes[std::string(to_string(cls))] = std::move(rec);
  }
  doc["classes"] = std::move(classes);
  return doc;
}

NoiseModel NoiseModel::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("classes") || !doc["classes"].is_object()) {
    throw ParseError("noise model: expected an object with a 'classes' object");
  }
  if (doc.contains("format") && doc["format"] != kFormat) {
    throw ParseError("noise model: unsupported format " + doc["format"].dump());
  }
  NoiseModel m;
  for (const auto& [name, rec] : doc["classes"].items()) {
    const auto cls = parse_class(name);
    if (!cls) throw ParseError("noise model: unknown class '" + name + "'");
    if (!rec.is_object() || !rec.contains("Q") || !rec.contains("R") || !rec.contains("Sigma0")) {
      throw ParseError("noise model: class '" + name + "' needs Q, R and Sigma0");
    }
    ClassNoise n;
    n.q = diag_from<kStateDim>(rec["Q"], name, "Q");
    n.r = diag_from<kObsDim>(rec["R"], name, "R");
    n.sigma0 = diag_from<kStateDim>(rec["Sigma0"], name, "Sigma0");
    m.set(*cls, n);
  }
  try {
    m.validate();
  } catch (const CalibrationError& e) {
    throw ParseError(e.what());
  }
  return m;
}

std::vector<GroundTruthTrack> to_tracks(const GroundTruthSet& gt) {
  std::map<std::pair<std::string, std::string>, GroundTruthTrack> by_key;
  for (const auto& [scene, frames] : gt) {
    for (const auto& [frame, boxes] : frames) {
      for (const auto& g : boxes) {
        auto& t = by_key[{scene, g.instance_id}];
        if (t.frames.empty()) {
          t.scene_id = scene;
          t.instance_id = g.instance_id;
          t.class_label = g.class_label;
        }
        t.frames[frame] = g.box;
      }
    }
  }
  std::vector<GroundTruthTrack> out;
  out.reserve(by_key.size());
  for (auto& [key, t] : by_key) out.push_back(std::move(t));
  return out;
}

std::map<ObjectClass, std::array<double, kStateDim>> estimate_process_noise(
    std::span<const GroundTruthTrack> tracks, const CalibrationOptions& options) {
  std::map<ObjectClass, Samples<4>> by_class;
  for (const GroundTruthTrack* t : sorted_tracks(tracks)) {
    auto& s = by_class[t->class_label];
    // Second differences only across three consecutive frame indices.
    auto it = t->frames.begin();
    while (it != t->frames.end()) {
      auto mid = std::next(it);
      if (mid == t->frames.end()) break;
      auto next = std::next(mid);
      if (next == t->frames.end()) break;
      if (mid->first == it->first + 1 && next->first == mid->first + 1) {
        const Observation& p = it->second;
        const Observation& c = mid->second;
        const Observation& n = next->second;
        s.components[0].push_back((n.x - c.x) - (c.x - p.x));
        s.components[1].push_back((n.y - c.y) - (c.y - p.y));
        s.components[2].push_back((n.z - c.z) - (c.z - p.z));
        s.components[3].push_back(
            wrap_angle(wrap_angle(n.yaw - c.yaw) - wrap_angle(c.yaw - p.yaw)));
      }
      ++it;
    }
  }
  by_class = pool_if_requested(std::move(by_class), options.pooled);

  std::map<ObjectClass, std::array<double, kStateDim>> out;
  for (const auto& [cls, s] : by_class) {
    if (s.size() < 2) {
      throw CalibrationError("estimate_process_noise: class '" + std::string(to_string(cls)) +
                             "' has " + std::to_string(s.size()) +
                             " second-difference samples; need at least 2");
    }
    std::array<double, kStateDim> q{};
    for (int k = 0; k < 4; ++k) {
      const double v = variance(s.components[static_cast<std::size_t>(k)]);
      q[static_cast<std::size_t>(k)] = v;
      q[static_cast<std::size_t>(kDx + k)] = v;
    }
    out[cls] = q;
  }
  return out;
}

std::map<ObjectClass, ObservationNoise> estimate_observation_noise(
    std::span<const GroundTruthTrack> tracks, const DetectionSet& detections,
    const std::map<ObjectClass, std::array<double, kStateDim>>& process_noise,
    const CalibrationOptions& options) {
  // Ground truth indexed by scene / frame / class.
  std::map<std::tuple<std::string, FrameIndex, ObjectClass>, std::vector<Observation>> gt_index;
  std::map<ObjectClass, Samples<kObsDim>> by_class;
  for (const GroundTruthTrack* t : sorted_tracks(tracks)) {
    by_class[t->class_label];
    for (const auto& [frame, box] : t->frames) {
      gt_index[{t->scene_id, frame, t->class_label}].push_back(box);
    }
  }

  for (const auto& [scene, frames] : detections) {
    for (const auto& [frame, dets] : frames) {
      std::map<ObjectClass, std::vector<Observation>> det_by_class;
      for (const auto& d : dets) det_by_class[d.class_label].push_back(d.observation);
      for (const auto& [cls, det_boxes] : det_by_class) {
        const auto it = gt_index.find({scene, frame, cls});
        if (it == gt_index.end()) continue;
        const std::vector<Observation>& gt_boxes = it->second;
        const MatchResult m = match_by_center_distance(gt_boxes, det_boxes, options.match_gate);
        auto& s = by_class[cls];
        for (const auto& p : m.pairs) {
          const Observation& g = gt_boxes[static_cast<std::size_t>(p.prediction)];
          const Observation& d = det_boxes[static_cast<std::size_t>(p.detection)];
          const Vector7 res = d.to_vector() - g.to_vector();
          for (int k = 0; k < kObsDim; ++k) {
            s.components[static_cast<std::size_t>(k)].push_back(k == kYaw ? wrap_angle(res[k])
                                                                           : res[k]);
          }
        }
      }
    }
  }
  by_class = pool_if_requested(std::move(by_class), options.pooled);

  std::map<ObjectClass, ObservationNoise> out;
  for (const auto& [cls, s] : by_class) {
    if (s.size() == 0) {
      throw CalibrationError("estimate_observation_noise: class '" +
                             std::string(to_string(cls)) + "' has no matched detections");
    }
    const auto q_it = process_noise.find(cls);
    if (q_it == process_noise.end()) {
      throw CalibrationError("estimate_observation_noise: no process noise for class '" +
                             std::string(to_string(cls)) + "'");
    }
    ObservationNoise n;
    for (int k = 0; k < kObsDim; ++k) {
      n.r[static_cast<std::size_t>(k)] = variance(s.components[static_cast<std::size_t>(k)]);
      n.sigma0[static_cast<std::size_t>(k)] = n.r[static_cast<std::size_t>(k)];
    }
    for (int k = kDx; k < kStateDim; ++k) {
      n.sigma0[static_cast<std::size_t>(k)] = q_it->second[static_cast<std::size_t>(k)];
    }
    out[cls] = n;
  }
  return out;
}

NoiseModel calibrate(const GroundTruthSet& gt, const DetectionSet& detections,
                     const CalibrationOptions& options) {
  const std::vector<GroundTruthTrack> tracks = to_tracks(gt);
  const auto q = estimate_process_noise(tracks, options);
  const auto obs = estimate_observation_noise(tracks, detections, q, options);
  NoiseModel model;
  for (const auto& [cls, o] : obs) {
    ClassNoise n;
    n.q = q.at(cls);
    n.r = o.r;
    n.sigma0 = o.sigma0;
    model.set(cls, n);
  }
  model.validate();
  return model;
}

}  // namespace mot3d
