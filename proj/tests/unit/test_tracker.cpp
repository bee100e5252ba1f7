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

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "mot3d/errors.hpp"
#include "mot3d/tracker.hpp"

namespace mot3d {
namespace {

Detection car_at(FrameIndex f, double x, double y = 0.0, double yaw = 0.0) {
  Detection d;
  d.observation = Observation{x, y, 0.8, yaw, 4.5, 1.9, 1.6};
  d.class_label = ObjectClass::kCar;
  d.score = 0.8;
  d.frame_index = f;
  d.scene_id = "s";
  return d;
}

TrackerConfig no_warmup() {
  TrackerConfig c;
  c.warmup_output = false;
  return c;
}

std::set<std::int64_t> ids_in(const FrameOutput& f) {
  std::set<std::int64_t> out;
  for (const auto& r : f.records) out.insert(r.track_id);
  return out;
}

TEST(Step, EmptyFrameNoTracks) {
  Tracker t(NoiseModel::default_covariance(), TrackerConfig{});
  EXPECT_TRUE(t.step(0, {}).records.empty());
  EXPECT_TRUE(t.tracks().empty());
}

TEST(Step, BirthAfterThreeConsecutiveHits) {
  Tracker t(NoiseModel::default_covariance(), no_warmup());
  for (FrameIndex f = 0; f < 3; ++f) {
    const std::vector<Detection> d = {car_at(f, 0.1 * static_cast<double>(f))};
    const FrameOutput out = t.step(f, d);
    if (f < 2) {
      EXPECT_TRUE(out.records.empty()) << "frame " << f;
    } else {
      ASSERT_EQ(out.records.size(), 1u);
      EXPECT_EQ(out.records[0].track_id, 1);
      EXPECT_EQ(out.records[0].score, 0.8);
    }
  }
  EXPECT_EQ(t.stats().born, 1);
  EXPECT_EQ(t.stats().confirmed, 1);
}

TEST(Step, WarmupReportsTentativeTracksOnlyAtSceneStart) {
  Tracker t(NoiseModel::default_covariance(), TrackerConfig{});
  std::vector<Detection> d = {car_at(0, 0.0)};
  EXPECT_EQ(t.step(0, d).records.size(), 1u);
  // Second object appears after the warm-up window: hidden until confirmed.
  for (FrameIndex f = 1; f < 8; ++f) {
    d = {car_at(f, 0.0)};
    if (f >= 4) d.push_back(car_at(f, 0.0, 30.0));
    const FrameOutput out = t.step(f, d);
    const std::size_t expect = f >= 6 ? 2u : 1u;
    EXPECT_EQ(out.records.size(), expect) << "frame " << f;
  }
}

TEST(Step, DeathAfterTwoConsecutiveMisses) {
  Tracker t(NoiseModel::default_covariance(), no_warmup());
  for (FrameIndex f = 0; f < 5; ++f) {
    const std::vector<Detection> d = {car_at(f, 0.0)};
    t.step(f, d);
  }
  // One miss: still reported (coasting on the prediction).
  EXPECT_EQ(t.step(5, {}).records.size(), 1u);
  EXPECT_EQ(t.tracks()[0].consecutive_misses, 1);
  EXPECT_EQ(t.tracks()[0].consecutive_hits, 0);
  EXPECT_TRUE(t.step(6, {}).records.empty());
  EXPECT_TRUE(t.tracks().empty());
  // A new detection starts a new id.
  const std::vector<Detection> d = {car_at(7, 0.0)};
  t.step(7, d);
  ASSERT_EQ(t.tracks().size(), 1u);
  EXPECT_EQ(t.tracks()[0].track_id, 2);
  EXPECT_EQ(t.stats().died, 1);
}

TEST(Step, MissResetsBirthCount) {
  Tracker t(NoiseModel::default_covariance(), no_warmup());
  std::vector<Detection> d = {car_at(0, 0.0)};
  t.step(0, d);
  d = {car_at(1, 0.0)};
  t.step(1, d);
  t.step(2, {});
  EXPECT_EQ(t.tracks()[0].consecutive_hits, 0);
  d = {car_at(3, 0.0)};
  EXPECT_TRUE(t.step(3, d).records.empty());
  d = {car_at(4, 0.0)};
  EXPECT_TRUE(t.step(4, d).records.empty());
  d = {car_at(5, 0.0)};
  EXPECT_EQ(t.step(5, d).records.size(), 1u);
}

TEST(Step, FrameGapCountsAsMisses) {
  Tracker t(NoiseModel::default_covariance(), no_warmup());
  for (FrameIndex f = 0; f < 4; ++f) {
    const std::vector<Detection> d = {car_at(f, 0.0)};
    t.step(f, d);
  }
  const std::vector<Detection> d = {car_at(10, 0.0)};
  const FrameOutput out = t.step(10, d);
  EXPECT_TRUE(out.records.empty());
  ASSERT_EQ(t.tracks().size(), 1u);
  EXPECT_EQ(t.tracks()[0].track_id, 2);
}

TEST(Step, SequencingAndClassErrors) {
  Tracker t(NoiseModel::default_covariance(), TrackerConfig{});
  t.step(3, {});
  EXPECT_THROW(t.step(3, {}), SequencingError);
  EXPECT_THROW(t.step(1, {}), SequencingError);
  const std::vector<Detection> wrong_frame = {car_at(9, 0.0)};
  EXPECT_THROW(t.step(4, wrong_frame), SequencingError);

  NoiseModel only_bus;
  only_bus.set(ObjectClass::kBus, NoiseModel::default_covariance().at(ObjectClass::kBus));
  Tracker u(only_bus, TrackerConfig{});
  const std::vector<Detection> d = {car_at(0, 0.0)};
  EXPECT_THROW(u.step(0, d), ConfigError);
}

TEST(Step, ClassesNeverMatchAcrossLabels) {
  Tracker t(NoiseModel::default_covariance(), no_warmup());
  for (FrameIndex f = 0; f < 6; ++f) {
    Detection d = car_at(f, 0.0);
    if (f % 2 == 1) d.class_label = ObjectClass::kTruck;
    const std::vector<Detection> ds = {d};
    EXPECT_TRUE(t.step(f, ds).records.empty());
  }
}

TEST(Step, HitsAndMissesNeverBothPositive) {
  TrackerConfig cfg = no_warmup();
  Tracker t(NoiseModel::default_covariance(), cfg);
  for (FrameIndex f = 0; f < 40; ++f) {
    std::vector<Detection> d;
    if (f % 5 != 0) d.push_back(car_at(f, 0.5 * static_cast<double>(f)));
    if (f % 3 != 0) d.push_back(car_at(f, 0.0, 20.0));
    t.step(f, d);
    for (const auto& tr : t.tracks()) {
      ASSERT_FALSE(tr.consecutive_hits > 0 && tr.consecutive_misses > 0);
      ASSERT_NE(tr.status, TrackStatus::kDead);
    }
  }
}

TEST(RunScene, NoiselessObjectKeepsOneId) {
  std::map<FrameIndex, std::vector<Detection>> frames;
  for (FrameIndex f = 0; f < 10; ++f) frames[f] = {car_at(f, 1.0 * static_cast<double>(f))};
  const SceneResult r = run_scene(frames, NoiseModel::default_covariance(), TrackerConfig{});
  std::set<std::int64_t> ids;
  for (const auto& f : r.frames) {
    EXPECT_EQ(f.records.size(), 1u);
    for (const auto& rec : f.records) ids.insert(rec.track_id);
  }
  EXPECT_EQ(ids, (std::set<std::int64_t>{1}));
}

TEST(RunScene, TwoSeparatedObjectsTwoIds) {
  std::map<FrameIndex, std::vector<Detection>> frames;
  for (FrameIndex f = 0; f < 12; ++f) {
    frames[f] = {car_at(f, 1.0 * static_cast<double>(f)), car_at(f, -1.0 * static_cast<double>(f), 25.0)};
  }
  const SceneResult r = run_scene(frames, NoiseModel::default_covariance(), TrackerConfig{});
  for (const auto& f : r.frames) EXPECT_EQ(ids_in(f), (std::set<std::int64_t>{1, 2}));
}

TEST(RunScene, ZeroFramesAndUnsortedSpan) {
  const SceneResult r = run_scene(std::map<FrameIndex, std::vector<Detection>>{},
                                  NoiseModel::default_covariance(), TrackerConfig{});
  EXPECT_TRUE(r.frames.empty());
  const std::vector<std::pair<FrameIndex, std::vector<Detection>>> bad = {{2, {}}, {1, {}}};
  EXPECT_THROW(run_scene(bad, NoiseModel::default_covariance(), TrackerConfig{}), SequencingError);
}

TEST(RunScene, MatchersAgreeOnSeparatedObjects) {
  std::map<FrameIndex, std::vector<Detection>> frames;
  for (FrameIndex f = 0; f < 12; ++f) {
    frames[f] = {car_at(f, 1.0 * static_cast<double>(f)), car_at(f, 0.0, 25.0)};
  }
  TrackerConfig g;
  TrackerConfig h;
  h.matcher = Matcher::kHungarian;
  TrackerConfig iou;
  iou.affinity = AffinityChoice::kIou;
  const NoiseModel n = NoiseModel::default_covariance();
  const SceneResult a = run_scene(frames, n, g);
  const SceneResult b = run_scene(frames, n, h);
  const SceneResult c = run_scene(frames, n, iou);
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    EXPECT_EQ(ids_in(a.frames[i]), ids_in(b.frames[i]));
    EXPECT_EQ(ids_in(a.frames[i]), ids_in(c.frames[i]));
  }
}

TEST(Tracker, CoastingTrackFollowsConstantVelocity) {
  Tracker t(NoiseModel::default_covariance(), no_warmup());
  for (FrameIndex f = 0; f < 15; ++f) {
    const std::vector<Detection> d = {car_at(f, 1.0 * static_cast<double>(f))};
    t.step(f, d);
  }
  t.step(15, {});
  ASSERT_EQ(t.tracks().size(), 1u);
  EXPECT_NEAR(t.tracks()[0].estimate.mean.x(), 15.0, 0.2);
}

TEST(Tracker, NoAngularVelocityKeepsYawRateZero) {
  TrackerConfig cfg;
  cfg.angular_velocity = false;
  Tracker t(NoiseModel::default_covariance(), cfg);
  for (FrameIndex f = 0; f < 10; ++f) {
    const std::vector<Detection> d = {car_at(f, 0.0, 0.0, 0.1 * static_cast<double>(f))};
    t.step(f, d);
    for (const auto& tr : t.tracks()) {
      EXPECT_EQ(tr.estimate.mean.dyaw(), 0.0);
      EXPECT_EQ(tr.estimate.covariance.row(kDyaw).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(Tracker, OrientationFlipDoesNotBreakTrack) {
  Tracker t(NoiseModel::default_covariance(), no_warmup());
  for (FrameIndex f = 0; f < 10; ++f) {
    const double yaw = f % 2 == 0 ? 0.05 : 0.05 + std::numbers::pi;
    const std::vector<Detection> d = {car_at(f, 0.5 * static_cast<double>(f), 0.0, wrap_angle(yaw))};
    t.step(f, d);
  }
  ASSERT_EQ(t.tracks().size(), 1u);
  EXPECT_EQ(t.tracks()[0].track_id, 1);
}

TEST(TrackAll, DeterministicAcrossJobCounts) {
  DetectionSet dets;
  for (int s = 0; s < 6; ++s) {
    auto& scene = dets["scene-" + std::to_string(s)];
    for (FrameIndex f = 0; f < 15; ++f) {
      scene[f] = {car_at(f, 1.0 * static_cast<double>(f) + s), car_at(f, 0.0, 30.0 + s)};
      if ((f + s) % 4 == 0) scene[f].pop_back();
    }
  }
  const NoiseModel n = NoiseModel::default_covariance();
  const TrackingRun one = track_all(dets, n, TrackerConfig{}, 1);
  const TrackingRun four = track_all(dets, n, TrackerConfig{}, 4);
  EXPECT_EQ(one.tracks, four.tracks);
  EXPECT_EQ(one.scenes.size(), 6u);
}

TEST(TrackAll, EmptyInputEmptyOutput) {
  const TrackingRun r = track_all({}, NoiseModel::default_covariance(), TrackerConfig{}, 3);
  EXPECT_TRUE(r.tracks.empty());
}

TEST(TrackAll, ErrorFromWorkerIsRethrown) {
  DetectionSet dets;
  dets["a"][0] = {car_at(0, 0.0)};
  dets["b"][0] = {car_at(5, 0.0)};  // frame mismatch
  EXPECT_THROW(track_all(dets, NoiseModel::default_covariance(), TrackerConfig{}, 2),
               SequencingError);
}

TEST(Config, Validation) {
  TrackerConfig c;
  c.maha_threshold = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrackerConfig{};
  c.iou_threshold = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrackerConfig{};
  c.class_maha_thresholds[ObjectClass::kCar] = 5.0;
  EXPECT_EQ(c.gate_for(ObjectClass::kCar), 5.0);
  EXPECT_EQ(c.gate_for(ObjectClass::kBus), kDefaultMahalanobisGate);
}

}  // namespace
}  // namespace mot3d
