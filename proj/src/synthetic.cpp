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

#include "mot3d/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "mot3d/errors.hpp"

namespace mot3d::synthetic {

namespace {

// Decorrelates the detection stream from the motion stream.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct TrajectoryPoint {
  std::int64_t frame;
  Observation box;
};

std::vector<TrajectoryPoint> integrate(const ObjectSpec& obj, const ScenarioSpec& spec, Rng& rng) {
  std::vector<TrajectoryPoint> out;
  const std::int64_t end =
      obj.lifespan < 0 ? spec.frame_count : std::min(spec.frame_count, obj.first_frame + obj.lifespan);
  Observation box = obj.initial;
  box.yaw = wrap_angle(box.yaw);
  std::array<double, 3> vel = obj.velocity;
  double yaw_rate = obj.yaw_rate;
  const double speed = std::hypot(obj.velocity[0], obj.velocity[1]);
  const auto& acc = spec.noise.acceleration_sigma;
  for (std::int64_t t = obj.first_frame; t < end; ++t) {
    out.push_back({t, box});
    if (obj.heading_aligned) {
      vel[0] = speed * std::cos(box.yaw);
      vel[1] = speed * std::sin(box.yaw);
    }
    box.x += vel[0];
    box.y += vel[1];
    box.z += vel[2];
    box.yaw = wrap_angle(box.yaw + yaw_rate);
    // Accelerations always drawn so the stream does not depend on sigmas.
    const double ax = rng.normal(), ay = rng.normal(), az = rng.normal(), aa = rng.normal();
    if (!obj.heading_aligned) {
      vel[0] += acc[0] * ax;
      vel[1] += acc[1] * ay;
    }
    vel[2] += acc[2] * az;
    yaw_rate += acc[3] * aa;
  }
  return out;
}

std::string instance_name(const ScenarioSpec& spec, std::size_t i) {
  return spec.scene_id + "-obj" + std::to_string(i);
}

template <std::size_t N>
std::array<double, N> read_array(const nlohmann::json& doc, const char* key,
                                 const std::array<double, N>& fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_array() || v.size() != N) {
    throw ParseError(std::string("scenario: '") + key + "' must be an array of " +
                     std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw ParseError(std::string("scenario: '") + key + "' non-numeric");
    out[i] = v[i].get<double>();
  }
  return out;
}

template <typename T>
T read_value(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("scenario: field '") + key + "' has the wrong type");
  }
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::int64_t Rng::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  // Knuth, split into chunks so exp(-lambda) stays representable.
  std::int64_t total = 0;
  while (lambda > 0.0) {
    const double chunk = std::min(lambda, 30.0);
    lambda -= chunk;
    const double limit = std::exp(-chunk);
    double p = 1.0;
    std::int64_t k = -1;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    total += k;
  }
  return total;
}

std::array<double, 3> typical_size(ObjectClass cls) {
  switch (cls) {
    case ObjectClass::kBicycle:
      return {1.7, 0.6, 1.3};
    case ObjectClass::kBus:
      return {11.0, 2.9, 3.5};
    case ObjectClass::kCar:
      return {4.6, 1.9, 1.7};
    case ObjectClass::kMotorcycle:
      return {2.1, 0.8, 1.5};
    case ObjectClass::kPedestrian:
      return {0.7, 0.7, 1.75};
    case ObjectClass::kTrailer:
      return {12.0, 2.9, 3.9};
    case ObjectClass::kTruck:
      return {7.0, 2.5, 3.0};
  }
  return {1.0, 1.0, 1.0};
}

void ScenarioSpec::validate() const {
  if (frame_count < 0) throw ConfigError("scenario: frame_count must be non-negative");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(noise.p_miss)) throw ConfigError("scenario: p_miss must be in [0, 1]");
  if (!(noise.false_positive_rate >= 0.0)) {
    throw ConfigError("scenario: false_positive_rate must be non-negative");
  }
  if (!prob(noise.tp_score_min) || !prob(noise.fp_score_max)) {
    throw ConfigError("scenario: score bounds must be in [0, 1]");
  }
  for (double s : noise.detection_sigma) {
    if (!(s >= 0.0)) throw ConfigError("scenario: detection sigmas must be non-negative");
  }
  for (double s : noise.acceleration_sigma) {
    if (!(s >= 0.0)) throw ConfigError("scenario: acceleration sigmas must be non-negative");
  }
  if (!(area_max[0] >= area_min[0] && area_max[1] >= area_min[1])) {
    throw ConfigError("scenario: area_max must not be below area_min");
  }
  for (const auto& o : objects) {
    if (!o.initial.valid()) throw ConfigError("scenario: object with invalid initial box");
    if (o.first_frame < 0) throw ConfigError("scenario: first_frame must be non-negative");
  }
}

nlohmann::ordered_json ScenarioSpec::to_json() const {
  nlohmann::ordered_json doc;
  doc["scene_id"] = scene_id;
  doc["frame_count"] = frame_count;
  doc["seed"] = seed;
  doc["area_min"] = area_min;
  doc["area_max"] = area_max;
  doc["noise"] = {
      {"detection_sigma", noise.detection_sigma},
      {"acceleration_sigma", noise.acceleration_sigma},
      {"p_miss", noise.p_miss},
      {"false_positive_rate", noise.false_positive_rate},
      {"tp_score_min", noise.tp_score_min},
      {"fp_score_max", noise.fp_score_max},
  };
  nlohmann::ordered_json objs = nlohmann::ordered_json::array();
  for (const auto& o : objects) {
    nlohmann::ordered_json od;
    od["class"] = std::string(to_string(o.class_label));
    od["center"] = {o.initial.x, o.initial.y, o.initial.z};
    od["yaw"] = o.initial.yaw;
    od["size"] = {o.initial.length, o.initial.width, o.initial.height};
    od["velocity"] = o.velocity;
    od["yaw_rate"] = o.yaw_rate;
    od["heading_aligned"] = o.heading_aligned;
    od["first_frame"] = o.first_frame;
    od["lifespan"] = o.lifespan;
    objs.push_back(std::move(od));
  }
  doc["objects"] = std::move(objs);
  return doc;
}

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("scenario: expected an object");
  ScenarioSpec s;
  s.scene_id = read_value<std::string>(doc, "scene_id", s.scene_id);
  s.frame_count = read_value<std::int64_t>(doc, "frame_count", 0);
  s.seed = read_value<std::uint64_t>(doc, "seed", 0);
  s.area_min = read_array<2>(doc, "area_min", s.area_min);
  s.area_max = read_array<2>(doc, "area_max", s.area_max);
  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    s.noise.detection_sigma = read_array<kObsDim>(n, "detection_sigma", s.noise.detection_sigma);
    s.noise.acceleration_sigma = read_array<4>(n, "acceleration_sigma", s.noise.acceleration_sigma);
    s.noise.p_miss = read_value<double>(n, "p_miss", 0.0);
    s.noise.false_positive_rate = read_value<double>(n, "false_positive_rate", 0.0);
    s.noise.tp_score_min = read_value<double>(n, "tp_score_min", s.noise.tp_score_min);
    s.noise.fp_score_max = read_value<double>(n, "fp_score_max", s.noise.fp_score_max);
  }
  if (doc.contains("objects")) {
    for (const auto& od : doc.at("objects")) {
      ObjectSpec o;
      const auto cls = parse_class(read_value<std::string>(od, "class", "car"));
      if (!cls) throw ParseError("scenario: unknown object class");
      o.class_label = *cls;
      const auto size = read_array<3>(od, "size", typical_size(o.class_label));
      const auto c = read_array<3>(od, "center", {0.0, 0.0, 0.5 * size[2]});
      o.initial = Observation{c[0], c[1], c[2], read_value<double>(od, "yaw", 0.0),
                              size[0], size[1], size[2]};
      o.velocity = read_array<3>(od, "velocity", o.velocity);
      o.yaw_rate = read_value<double>(od, "yaw_rate", 0.0);
      o.heading_aligned = read_value<bool>(od, "heading_aligned", false);
      o.first_frame = read_value<std::int64_t>(od, "first_frame", 0);
      o.lifespan = read_value<std::int64_t>(od, "lifespan", -1);
      s.objects.push_back(o);
    }
  }
  s.validate();
  return s;
}

SyntheticData generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng motion(spec.seed);
  Rng sensor(splitmix64(spec.seed));

  std::vector<std::vector<TrajectoryPoint>> trajectories;
  trajectories.reserve(spec.objects.size());
  for (const auto& obj : spec.objects) trajectories.push_back(integrate(obj, spec, motion));

  std::vector<ObjectClass> fp_classes;
  {
    std::set<ObjectClass> seen;
    for (const auto& o : spec.objects) seen.insert(o.class_label);
    fp_classes.assign(seen.begin(), seen.end());
    if (fp_classes.empty()) fp_classes.push_back(ObjectClass::kCar);
  }

  SyntheticData out;
  auto& gt_scene = out.ground_truth[spec.scene_id];
  auto& det_scene = out.detections[spec.scene_id];
  std::vector<std::size_t> cursor(trajectories.size(), 0);
  const auto& sigma = spec.noise.detection_sigma;
  for (std::int64_t t = 0; t < spec.frame_count; ++t) {
    auto& gt_frame = gt_scene[t];
    auto& det_frame = det_scene[t];
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      const auto& traj = trajectories[i];
      if (cursor[i] >= traj.size() || traj[cursor[i]].frame != t) continue;
      const Observation& truth = traj[cursor[i]].box;
      ++cursor[i];
      gt_frame.push_back({truth, spec.objects[i].class_label, instance_name(spec, i)});

      const double miss = sensor.uniform();
      std::array<double, kObsDim> n{};
      for (auto& v : n) v = sensor.normal();
      const double score = sensor.uniform(spec.noise.tp_score_min, 1.0);
      if (miss < spec.noise.p_miss) continue;

      Detection d;
      Vector7 v = truth.to_vector();
      for (int k = 0; k < kObsDim; ++k) v[k] += sigma[static_cast<std::size_t>(k)] * n[static_cast<std::size_t>(k)];
      v[kYaw] = wrap_angle(v[kYaw]);
      for (int k = kLength; k <= kHeight; ++k) v[k] = std::max(v[k], 1e-3);
      d.observation = Observation::from_vector(v);
      d.class_label = spec.objects[i].class_label;
      d.score = score;
      d.frame_index = t;
      d.scene_id = spec.scene_id;
      det_frame.push_back(d);
    }
    const std::int64_t fps = sensor.poisson(spec.noise.false_positive_rate);
    for (std::int64_t k = 0; k < fps; ++k) {
      const auto cls_index = static_cast<std::size_t>(sensor.uniform() * static_cast<double>(fp_classes.size()));
      const ObjectClass cls = fp_classes[std::min(cls_index, fp_classes.size() - 1)];
      const auto size = typical_size(cls);
      Detection d;
      d.observation.x = sensor.uniform(spec.area_min[0], spec.area_max[0]);
      d.observation.y = sensor.uniform(spec.area_min[1], spec.area_max[1]);
      d.observation.z = 0.5 * size[2];
      d.observation.yaw = wrap_angle(sensor.uniform(-std::numbers::pi, std::numbers::pi));
      d.observation.length = size[0];
      d.observation.width = size[1];
      d.observation.height = size[2];
      d.class_label = cls;
      d.score = sensor.uniform(0.0, spec.noise.fp_score_max);
      d.frame_index = t;
      d.scene_id = spec.scene_id;
      det_frame.push_back(d);
    }
  }
  return out;
}

SyntheticData generate(std::span<const ScenarioSpec> specs) {
  SyntheticData out;
  for (const auto& spec : specs) {
    if (out.ground_truth.contains(spec.scene_id)) {
      throw ConfigError("duplicate scene id '" + spec.scene_id + "'");
    }
    SyntheticData one = generate(spec);
    out.ground_truth.merge(one.ground_truth);
    out.detections.merge(one.detections);
  }
  return out;
}

nlohmann::ordered_json generator_meta(const ScenarioSpec& spec) {
  nlohmann::ordered_json meta;
  meta["generator"] = "mot3d-synthetic";
  meta["rng"] = kGeneratorVersion;
  meta["seed"] = spec.seed;
  return meta;
}

std::vector<ScenarioSpec> standard_noisy_suite(std::uint64_t seed, int scenes) {
  struct Kind {
    ObjectClass cls;
    double speed;
    int count;
  };
  // Pedestrians and bicycles move further per frame than their extent, so a
  // zero-velocity prediction does not overlap the next detection.
  constexpr std::array<Kind, 4> kKinds = {{
      {ObjectClass::kCar, 1.5, 3},
      {ObjectClass::kTruck, 1.2, 1},
      {ObjectClass::kBicycle, 1.5, 2},
      {ObjectClass::kPedestrian, 1.0, 3},
  }};
  std::vector<ScenarioSpec> out;
  Rng layout(seed);
  for (int s = 0; s < scenes; ++s) {
    ScenarioSpec spec;
    spec.scene_id = "synthetic-" + std::to_string(seed) + "-" + std::to_string(s);
    spec.frame_count = 30;
    spec.seed = splitmix64(seed * 1000003ULL + static_cast<std::uint64_t>(s));
    spec.noise.detection_sigma = {0.15, 0.15, 0.05, 0.05, 0.05, 0.05, 0.05};
    spec.noise.acceleration_sigma = {0.35, 0.35, 0.01, 0.01};
    spec.noise.p_miss = 0.1;
    spec.noise.false_positive_rate = 1.0;
    spec.noise.tp_score_min = 0.4;
    spec.noise.fp_score_max = 0.6;
    double lane = -60.0;
    for (const auto& kind : kKinds) {
      for (int k = 0; k < kind.count; ++k) {
        ObjectSpec o;
        o.class_label = kind.cls;
        const auto size = typical_size(kind.cls);
        const double heading = layout.uniform(-0.3, 0.3) + (layout.uniform() < 0.5 ? 0.0 : std::numbers::pi);
        o.initial = Observation{layout.uniform(-20.0, 20.0), lane, 0.5 * size[2],
                                wrap_angle(heading), size[0], size[1], size[2]};
        o.velocity = {kind.speed * std::cos(heading), kind.speed * std::sin(heading), 0.0};
        o.first_frame = static_cast<std::int64_t>(layout.uniform(0.0, 6.0));
        o.lifespan = -1;
        spec.objects.push_back(o);
        lane += 12.0;
      }
    }
    out.push_back(std::move(spec));
  }
  return out;
}

ScenarioSpec noiseless_scene(int objects, std::int64_t frames, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.scene_id = "noiseless-" + std::to_string(seed);
  spec.frame_count = frames;
  spec.seed = seed;
  const auto size = typical_size(ObjectClass::kCar);
  for (int i = 0; i < objects; ++i) {
    ObjectSpec o;
    o.class_label = ObjectClass::kCar;
    o.initial = Observation{-40.0, -40.0 + 20.0 * i, 0.5 * size[2], 0.0, size[0], size[1], size[2]};
    o.velocity = {0.8 + 0.2 * i, 0.05 * i, 0.0};
    spec.objects.push_back(o);
  }
  return spec;
}

ScenarioSpec turning_scene(double yaw_rate, double speed, std::int64_t frames) {
  ScenarioSpec spec;
  spec.scene_id = "turning";
  spec.frame_count = frames;
  const auto size = typical_size(ObjectClass::kCar);
  ObjectSpec o;
  o.class_label = ObjectClass::kCar;
  o.initial = Observation{0.0, 0.0, 0.5 * size[2], 0.0, size[0], size[1], size[2]};
  o.velocity = {speed, 0.0, 0.0};
  o.yaw_rate = yaw_rate;
  o.heading_aligned = true;
  spec.objects.push_back(o);
  return spec;
}

}  // namespace mot3d::synthetic
