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

#include "mot3d/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "mot3d/errors.hpp"

namespace mot3d {

namespace {

void pin_zero_yaw_rate(StateEstimate& e) {
  e.mean[kDyaw] = 0.0;
  e.covariance.row(kDyaw).setZero();
  e.covariance.col(kDyaw).setZero();
}

}  // namespace

std::string_view to_string(Matcher m) {
  return m == Matcher::kGreedy ? "greedy" : "hungarian";
}

std::string_view to_string(AffinityChoice a) {
  return a == AffinityChoice::kMahalanobis ? "mahalanobis" : "iou";
}

double TrackerConfig::gate_for(ObjectClass cls) const {
  const auto it = class_maha_thresholds.find(cls);
  return it == class_maha_thresholds.end() ? maha_threshold : it->second;
}

void TrackerConfig::validate() const {
  if (!(maha_threshold > 0.0)) throw ConfigError("maha_threshold must be positive");
  for (const auto& [cls, t] : class_maha_thresholds) {
    if (!(t > 0.0)) {
      throw ConfigError("maha_threshold for '" + std::string(to_string(cls)) +
                        "' must be positive");
    }
  }
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ConfigError("iou_threshold must be in (0, 1)");
  }
  if (birth_hits < 1) throw ConfigError("birth_hits must be at least 1");
  if (death_misses < 1) throw ConfigError("death_misses must be at least 1");
}

Tracker::Tracker(NoiseModel noise, TrackerConfig config)
    : noise_(std::move(noise)), config_(std::move(config)) {
  config_.validate();
  noise_.validate();
}

CovMatrix11 Tracker::process_noise(ObjectClass cls) const {
  CovMatrix11 q = noise_.at(cls).process_noise();
  if (!config_.angular_velocity) {
    q.row(kDyaw).setZero();
    q.col(kDyaw).setZero();
  }
  return q;
}

StateEstimate Tracker::initial_estimate(const Detection& det) const {
  StateEstimate e;
  e.mean = StateVector::from_observation(det.observation);
  e.covariance = noise_.at(det.class_label).initial_covariance();
  if (!config_.angular_velocity) pin_zero_yaw_rate(e);
  return e;
}

FrameOutput Tracker::step(FrameIndex frame_index, std::span<const Detection> detections) {
  if (last_frame_ && frame_index <= *last_frame_) {
    throw SequencingError("frame " + std::to_string(frame_index) +
                          " does not follow already processed frame " +
                          std::to_string(*last_frame_));
  }
  if (frame_index < 0) throw SequencingError("negative frame index");
  for (const auto& d : detections) {
    if (d.frame_index != frame_index) {
      throw SequencingError("detection with frame_index " + std::to_string(d.frame_index) +
                            " passed to frame " + std::to_string(frame_index));
    }
    noise_.at(d.class_label);
    if (!d.observation.valid()) throw DomainError("detection with invalid box");
  }

  // Skipped frame indices are empty frames. After death_misses of them no
  // track survives, so only that many need simulating.
  if (last_frame_ && frame_index > *last_frame_ + 1) {
    const std::int64_t gap = frame_index - *last_frame_ - 1;
    const std::int64_t simulated = std::min<std::int64_t>(gap, config_.death_misses);
    for (std::int64_t k = 0; k < simulated; ++k) {
      ++frames_seen_;
      for (ObjectClass cls : kAllClasses) step_class(cls, {});
      std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::kDead; });
    }
    frames_seen_ += gap - simulated;
  }
  last_frame_ = frame_index;
  ++frames_seen_;

  std::map<ObjectClass, std::vector<const Detection*>> by_class;
  for (const auto& d : detections) by_class[d.class_label].push_back(&d);
  for (ObjectClass cls : kAllClasses) {
    const auto it = by_class.find(cls);
    if (it == by_class.end()) {
      step_class(cls, {});
    } else {
      step_class(cls, it->second);
    }
  }
  std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::kDead; });

  const bool warmup = config_.warmup_output && frames_seen_ <= config_.birth_hits;
  FrameOutput out;
  out.frame_index = frame_index;
  for (const auto& t : tracks_) {
    if (t.status == TrackStatus::kConfirmed || (warmup && t.status == TrackStatus::kTentative)) {
      out.records.push_back({t.track_id, t.class_label, t.estimate.mean, t.last_score});
    }
  }
  return out;
}

void Tracker::step_class(ObjectClass cls, std::span<const Detection* const> detections) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (tracks_[i].class_label == cls && tracks_[i].status != TrackStatus::kDead) {
      live.push_back(i);
    }
  }
  if (live.empty() && detections.empty()) return;

  std::vector<Prediction> predictions;
  if (!live.empty()) {
    const CovMatrix11 q = process_noise(cls);
    const CovMatrix7 r = noise_.at(cls).observation_noise();
    predictions.reserve(live.size());
    for (std::size_t i : live) {
      StateEstimate e = tracks_[i].estimate;
      if (!config_.angular_velocity) pin_zero_yaw_rate(e);
      predictions.push_back(predict(e, q, r));
    }
  }
  std::vector<Observation> observations;
  observations.reserve(detections.size());
  for (const Detection* d : detections) observations.push_back(d->observation);

  MatchResult match;
  {
    AffinityMatrix distances;
    double threshold = 0.0;
    if (config_.affinity == AffinityChoice::kMahalanobis) {
      distances = mahalanobis_affinity(predictions, observations);
      threshold = config_.gate_for(cls);
    } else {
      distances = iou_as_distance(iou_affinity(predictions, observations));
      threshold = 1.0 - config_.iou_threshold;
    }
    match = config_.matcher == Matcher::kGreedy ? greedy_match(distances, threshold)
                                                : hungarian_match(distances, threshold);
  }

  for (const auto& p : match.pairs) {
    Track& t = tracks_[live[static_cast<std::size_t>(p.prediction)]];
    const Detection& det = *detections[static_cast<std::size_t>(p.detection)];
    const Prediction corrected =
        apply_orientation_correction(predictions[static_cast<std::size_t>(p.prediction)],
                                     det.observation);
    t.estimate = update(corrected, det.observation);
    t.consecutive_hits += 1;
    t.consecutive_misses = 0;
    t.last_score = det.score;
    if (t.status == TrackStatus::kTentative && t.consecutive_hits >= config_.birth_hits) {
      t.status = TrackStatus::kConfirmed;
      ++stats_.confirmed;
    }
  }
  for (int pi : match.unmatched_predictions) {
    Track& t = tracks_[live[static_cast<std::size_t>(pi)]];
    t.estimate = predictions[static_cast<std::size_t>(pi)].predicted_estimate;
    t.consecutive_misses += 1;
    t.consecutive_hits = 0;
    if (t.consecutive_misses >= config_.death_misses) {
      t.status = TrackStatus::kDead;
      ++stats_.died;
    }
  }
  for (int di : match.unmatched_detections) {
    const Detection& det = *detections[static_cast<std::size_t>(di)];
    Track t;
    t.track_id = next_id_++;
    t.class_label = cls;
    t.estimate = initial_estimate(det);
    t.consecutive_hits = 1;
    t.consecutive_misses = 0;
    t.last_score = det.score;
    t.status = config_.birth_hits <= 1 ? TrackStatus::kConfirmed : TrackStatus::kTentative;
    ++stats_.born;
    if (t.status == TrackStatus::kConfirmed) ++stats_.confirmed;
    tracks_.push_back(std::move(t));
  }
}

SceneResult run_scene(const std::map<FrameIndex, std::vector<Detection>>& frames,
                      const NoiseModel& noise, const TrackerConfig& config) {
  Tracker tracker(noise, config);
  SceneResult out;
  out.frames.reserve(frames.size());
  for (const auto& [frame, dets] : frames) out.frames.push_back(tracker.step(frame, dets));
  out.stats = tracker.stats();
  return out;
}

SceneResult run_scene(std::span<const std::pair<FrameIndex, std::vector<Detection>>> frames,
                      const NoiseModel& noise, const TrackerConfig& config) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].first <= frames[i - 1].first) {
      throw SequencingError("run_scene: frames not sorted ascending at position " +
                            std::to_string(i));
    }
  }
  Tracker tracker(noise, config);
  SceneResult out;
  out.frames.reserve(frames.size());
  for (const auto& [frame, dets] : frames) out.frames.push_back(tracker.step(frame, dets));
  out.stats = tracker.stats();
  return out;
}

TrackRecord to_track_record(const OutputRecord& record) {
  return TrackRecord{record.track_id, record.class_label, record.state.observed(), record.score};
}

TrackingRun track_all(const DetectionSet& detections, const NoiseModel& noise,
                      const TrackerConfig& config, unsigned jobs) {
  std::vector<const std::string*> names;
  std::vector<const std::map<FrameIndex, std::vector<Detection>>*> inputs;
  for (const auto& [scene, frames] : detections) {
    names.push_back(&scene);
    inputs.push_back(&frames);
  }
  const std::size_t n = names.size();
  std::vector<SceneResult> results(n);
  std::vector<std::exception_ptr> errors(n);

  auto work = [&](std::atomic<std::size_t>& next) {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_scene(*inputs[i], noise, config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  if (workers <= 1) {
    work(next);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([&] { work(next); });
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  TrackingRun run;
  for (std::size_t i = 0; i < n; ++i) {
    auto& scene_tracks = run.tracks[*names[i]];
    for (const auto& f : results[i].frames) {
      auto& recs = scene_tracks[f.frame_index];
      for (const auto& r : f.records) recs.push_back(to_track_record(r));
    }
    run.scenes.emplace(*names[i], std::move(results[i]));
  }
  return run;
}

}  // namespace mot3d
