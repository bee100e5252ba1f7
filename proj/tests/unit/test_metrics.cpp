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
#include <random>

#include <gtest/gtest.h>

#include "mot3d/errors.hpp"
#include "mot3d/metrics.hpp"

namespace mot3d {
namespace {

GroundTruthBox gt_at(const std::string& id, double x, double y = 0.0,
                     ObjectClass cls = ObjectClass::kCar) {
  return {Observation{x, y, 0.8, 0.0, 4.5, 1.9, 1.6}, cls, id};
}

TrackRecord track_at(std::int64_t id, double x, double score, double y = 0.0,
                     ObjectClass cls = ObjectClass::kCar) {
  return {id, cls, Observation{x, y, 0.8, 0.0, 4.5, 1.9, 1.6}, score};
}

TEST(Motar, SpotValues) {
  EXPECT_EQ(*motar(0, 0, 0, 100, 0.3), 1.0);
  EXPECT_EQ(*motar(0, 0, 0, 100, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(*motar(10, 20, 30, 100, 0.5), 0.8);
  EXPECT_EQ(*motar(50, 50, 100, 100, 0.5), 0.0);
  EXPECT_FALSE(motar(0, 0, 0, 0, 0.5).has_value());
  EXPECT_THROW(motar(0, 0, 0, 10, 0.0), DomainError);
  EXPECT_THROW(motar(0, 0, 0, 10, 1.5), DomainError);
}

TEST(Motar, NonIncreasingInEachErrorCount) {
  for (int p : {10, 57, 200}) {
    for (double r : {0.1, 0.5, 0.9, 1.0}) {
      for (int e = 0; e < 60; ++e) {
        EXPECT_GE(*motar(e, 3, 4, p, r), *motar(e + 1, 3, 4, p, r));
        EXPECT_GE(*motar(3, e, 4, p, r), *motar(3, e + 1, 4, p, r));
        EXPECT_GE(*motar(3, 4, e, p, r), *motar(3, 4, e + 1, p, r));
      }
    }
  }
}

TEST(MatchFrame, PerfectAndOutsideGate) {
  IdAssignment a;
  const std::vector<GroundTruthBox> gt = {gt_at("a", 0), gt_at("b", 10)};
  const std::vector<TrackRecord> tr = {track_at(1, 0.1, 1), track_at(2, 10, 1)};
  const FrameMatch m = match_frame(gt, tr, a);
  EXPECT_EQ(m.counts, (FrameCounts{2, 0, 0, 0}));

  IdAssignment b;
  const std::vector<GroundTruthBox> one = {gt_at("a", 0)};
  const std::vector<TrackRecord> far = {track_at(1, 2.5, 1)};
  EXPECT_EQ(match_frame(one, far, b).counts, (FrameCounts{0, 1, 1, 0}));
}

TEST(MatchFrame, IdSwitchCountedOnChange) {
  IdAssignment a;
  const std::vector<GroundTruthBox> gt = {gt_at("a", 0)};
  std::vector<TrackRecord> t7 = {track_at(7, 0, 1)};
  std::vector<TrackRecord> t9 = {track_at(9, 0, 1)};
  EXPECT_EQ(match_frame(gt, t7, a).counts.ids, 0);
  EXPECT_EQ(match_frame(gt, t9, a).counts.ids, 1);
  EXPECT_EQ(match_frame(gt, t9, a).counts.ids, 0);
  // Unmatched frame in between keeps the last assignment.
  EXPECT_EQ(match_frame(gt, {}, a).counts.fn, 1);
  EXPECT_EQ(match_frame(gt, t7, a).counts.ids, 1);
}

GroundTruthSet perfect_gt(int objects, int frames) {
  GroundTruthSet gt;
  for (int f = 0; f < frames; ++f) {
    for (int o = 0; o < objects; ++o) {
      gt["s"][f].push_back(gt_at("o" + std::to_string(o), 1.0 * f, 20.0 * o));
    }
  }
  return gt;
}

TrackSet tracks_from(const GroundTruthSet& gt, double score = 0.9) {
  TrackSet t;
  for (const auto& [scene, frames] : gt) {
    for (const auto& [f, boxes] : frames) {
      auto& recs = t[scene][f];
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        recs.push_back({static_cast<std::int64_t>(i + 1), boxes[i].class_label, boxes[i].box, score});
      }
    }
  }
  return t;
}

TEST(Amota, PerfectTrackerIsOne) {
  const GroundTruthSet gt = perfect_gt(3, 10);
  for (int n : {2, 3, 11, 40}) {
    EvalOptions o;
    o.n_samples = n;
    const EvalReport r = amota(tracks_from(gt), gt, o);
    ASSERT_TRUE(r.overall_amota.has_value());
    EXPECT_EQ(*r.overall_amota, 1.0);
    EXPECT_EQ(r.classes[0].samples.size(), static_cast<std::size_t>(n - 1));
  }
}

TEST(Amota, EmptyTracksIsZeroEmptyGtHasNoClasses) {
  const GroundTruthSet gt = perfect_gt(2, 5);
  const EvalReport r = amota({}, gt);
  EXPECT_EQ(*r.overall_amota, 0.0);
  for (const auto& s : r.classes[0].samples) EXPECT_FALSE(s.reachable);
  const EvalReport e = amota(tracks_from(gt), {});
  EXPECT_TRUE(e.classes.empty());
  EXPECT_FALSE(e.overall_amota.has_value());
}

TEST(Amota, HandTracedOperatingPoints) {
  GroundTruthSet gt;
  gt["s"][0] = {gt_at("a", 0)};
  gt["s"][1] = {gt_at("a", 0)};
  TrackSet tr;
  tr["s"][0] = {track_at(1, 0, 0.9)};
  tr["s"][1] = {track_at(1, 0, 0.3), track_at(2, 50, 0.8)};
  EvalOptions o;
  o.n_samples = 3;  // targets 0.5 and 1
  const EvalReport r = amota(tr, gt, o);
  const ClassReport& c = r.classes[0];
  ASSERT_EQ(c.samples.size(), 2u);
  EXPECT_EQ(*c.samples[0].score_threshold, 0.9);
  EXPECT_DOUBLE_EQ(c.samples[0].motar, 1.0);
  EXPECT_EQ(*c.samples[1].score_threshold, 0.3);
  EXPECT_EQ(c.samples[1].fp, 1);
  EXPECT_DOUBLE_EQ(c.samples[1].motar, 0.5);
  EXPECT_DOUBLE_EQ(c.amota, 0.75);
}

TEST(Amota, IsMeanOfSamples) {
  std::mt19937_64 rng(81);
  const GroundTruthSet gt = perfect_gt(4, 20);
  TrackSet tr = tracks_from(gt);
  std::uniform_real_distribution<double> u(0, 1), j(-1.5, 1.5);
  for (auto& [f, recs] : tr["s"]) {
    for (auto& r : recs) {
      r.score = u(rng);
      r.box.x += j(rng);
    }
    recs.push_back(track_at(99, 1000.0 * u(rng), u(rng)));
  }
  const EvalReport r = amota(tr, gt);
  double sum = 0;
  for (const auto& s : r.classes[0].samples) sum += s.motar;
  EXPECT_NEAR(r.classes[0].amota, sum / 39.0, 1e-15);
}

TEST(Amota, InvariantUnderMonotoneScoreTransform) {
  std::mt19937_64 rng(82);
  const GroundTruthSet gt = perfect_gt(5, 25);
  TrackSet tr = tracks_from(gt);
  std::uniform_real_distribution<double> u(0, 1), j(-2.5, 2.5);
  for (auto& [f, recs] : tr["s"]) {
    for (auto& r : recs) {
      r.score = u(rng);
      r.box.x += j(rng);
      if (u(rng) < 0.1) r.track_id += 10;
    }
    recs.push_back(track_at(50, 500.0, u(rng)));
  }
  const double base = *amota(tr, gt).overall_amota;
  TrackSet squashed = tr;
  for (auto& [f, recs] : squashed["s"]) {
    for (auto& r : recs) r.score = std::pow(r.score, 3.0) * 0.5 + 0.1;
  }
  EXPECT_EQ(*amota(squashed, gt).overall_amota, base);
}

TEST(Amota, FalsePositivesNonIncreasingInThreshold) {
  std::mt19937_64 rng(83);
  const GroundTruthSet gt = perfect_gt(3, 15);
  TrackSet tr = tracks_from(gt);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& [f, recs] : tr["s"]) {
    for (auto& r : recs) r.score = u(rng);
    for (int k = 0; k < 3; ++k) recs.push_back(track_at(100 + k, 300.0 + 10 * k, u(rng)));
  }
  std::int64_t prev = -1;
  for (double t = 1.0; t >= 0.0; t -= 0.05) {
    const FrameCounts c = evaluate_at_threshold(tr, gt, ObjectClass::kCar, t);
    if (prev >= 0) EXPECT_GE(c.fp, prev);
    prev = c.fp;
  }
}

TEST(Amota, ClassesEvaluatedSeparately) {
  GroundTruthSet gt;
  gt["s"][0] = {gt_at("a", 0), gt_at("p", 30, 0, ObjectClass::kPedestrian)};
  TrackSet tr;
  // Right place, wrong class: never a TP.
  tr["s"][0] = {track_at(1, 0, 0.9, 0, ObjectClass::kTruck),
                track_at(2, 30, 0.9, 0, ObjectClass::kPedestrian)};
  const EvalReport r = amota(tr, gt);
  EXPECT_EQ(r.find(ObjectClass::kCar)->amota, 0.0);
  EXPECT_EQ(r.find(ObjectClass::kPedestrian)->amota, 1.0);
  EXPECT_EQ(r.find(ObjectClass::kTruck), nullptr);
  EXPECT_DOUBLE_EQ(*r.overall_amota, 0.5);
}

TEST(Amota, ThresholdSubsamplingKeepsPerfectScore) {
  const GroundTruthSet gt = perfect_gt(3, 40);
  TrackSet tr = tracks_from(gt);
  double s = 0.001;
  for (auto& [f, recs] : tr["s"]) {
    for (auto& r : recs) r.score = (s += 0.0005);
  }
  EvalOptions o;
  o.max_thresholds = 10;
  EXPECT_EQ(*amota(tr, gt, o).overall_amota, 1.0);
}

TEST(Table, CsvLayout) {
  EXPECT_EQ(table_csv_header(), "Method,Overall,bicycle,bus,car,motorcycle,pedestrian,trailer,truck");
  const GroundTruthSet gt = perfect_gt(1, 3);
  EXPECT_EQ(table_csv_row("m", amota(tracks_from(gt), gt)), "m,100.00,,,100.00,,,,");
  const auto doc = amota(tracks_from(gt), gt).to_json();
  EXPECT_EQ(doc["classes"][0]["class"], "car");
  EXPECT_EQ(doc["overall"]["amota"], 1.0);
}

}  // namespace
}  // namespace mot3d
