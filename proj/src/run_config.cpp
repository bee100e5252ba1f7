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

#include "mot3d/run_config.hpp"

#include <set>

#include "mot3d/dataset.hpp"
#include "mot3d/errors.hpp"

namespace mot3d {

Matcher parse_matcher(const std::string& name) {
  if (name == "greedy") return Matcher::kGreedy;
  if (name == "hungarian") return Matcher::kHungarian;
  throw ConfigError("unknown matcher '" + name + "' (expected greedy or hungarian)");
}

AffinityChoice parse_affinity(const std::string& name) {
  if (name == "mahalanobis") return AffinityChoice::kMahalanobis;
  if (name == "iou") return AffinityChoice::kIou;
  throw ConfigError("unknown affinity '" + name + "' (expected mahalanobis or iou)");
}

void RunConfig::validate() const {
  tracker.validate();
  if (amota_samples < 2) throw ConfigError("amota_samples must be at least 2");
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json doc;
  doc["matcher"] = std::string(to_string(tracker.matcher));
  doc["affinity"] = std::string(to_string(tracker.affinity));
  doc["maha_threshold"] = tracker.maha_threshold;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (const auto& [cls, t] : tracker.class_maha_thresholds) {
    per_class[std::string(to_string(cls))] = t;
  }
  doc["class_maha_thresholds"] = std::move(per_class);
  doc["iou_threshold"] = tracker.iou_threshold;
  doc["angular_velocity"] = tracker.angular_velocity;
  doc["birth_hits"] = tracker.birth_hits;
  doc["death_misses"] = tracker.death_misses;
  doc["warmup_output"] = tracker.warmup_output;
  doc["amota_samples"] = amota_samples;
  doc["noise_model"] = noise_model_path ? nlohmann::ordered_json(noise_model_path->string())
                                        : nlohmann::ordered_json(nullptr);
  doc["default_covariance"] = default_covariance;
  return doc;
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> kKeys = {
      "matcher",      "affinity",      "maha_threshold", "class_maha_thresholds",
      "iou_threshold", "angular_velocity", "birth_hits",   "death_misses",
      "warmup_output", "amota_samples", "noise_model",    "default_covariance"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  try {
    if (doc.contains("matcher")) c.tracker.matcher = parse_matcher(doc["matcher"].get<std::string>());
    if (doc.contains("affinity")) {
      c.tracker.affinity = parse_affinity(doc["affinity"].get<std::string>());
    }
    if (doc.contains("maha_threshold")) c.tracker.maha_threshold = doc["maha_threshold"].get<double>();
    if (doc.contains("class_maha_thresholds")) {
      for (const auto& [name, value] : doc["class_maha_thresholds"].items()) {
        const auto cls = parse_class(name);
        if (!cls) throw ConfigError("config: unknown class '" + name + "'");
        c.tracker.class_maha_thresholds[*cls] = value.get<double>();
      }
    }
    if (doc.contains("iou_threshold")) c.tracker.iou_threshold = doc["iou_threshold"].get<double>();
    if (doc.contains("angular_velocity")) {
      c.tracker.angular_velocity = doc["angular_velocity"].get<bool>();
    }
    if (doc.contains("birth_hits")) c.tracker.birth_hits = doc["birth_hits"].get<int>();
    if (doc.contains("death_misses")) c.tracker.death_misses = doc["death_misses"].get<int>();
    if (doc.contains("warmup_output")) c.tracker.warmup_output = doc["warmup_output"].get<bool>();
    if (doc.contains("amota_samples")) c.amota_samples = doc["amota_samples"].get<int>();
    if (doc.contains("noise_model") && !doc["noise_model"].is_null()) {
      c.noise_model_path = doc["noise_model"].get<std::string>();
    }
    if (doc.contains("default_covariance")) {
      c.default_covariance = doc["default_covariance"].get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return from_json(read_json(path));
}

}  // namespace mot3d
