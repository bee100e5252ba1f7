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

// MOTAR / AMOTA evaluation.
//
// Ground truth and tracks are matched per frame and class, one-to-one, by
// ascending 2D center distance under a strict gate. Recall is pooled over all
// scenes of a class. For every target recall r the track-score threshold is
// the highest one reaching recall >= r; unreachable targets score MOTAR = 0
// and are flagged. These are the plain formulas; the official benchmark tool
// applies extra filtering, so results are comparable in ordering, not
// bit-for-bit.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mot3d/dataset.hpp"

namespace mot3d {

struct FrameCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t ids = 0;

  FrameCounts& operator+=(const FrameCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    ids += o.ids;
    return *this;
  }
  friend bool operator==(const FrameCounts&, const FrameCounts&) = default;
};

// Last track id matched to each ground-truth instance.
using IdAssignment = std::map<std::string, std::int64_t>;

struct FrameMatch {
  // (ground-truth index, track index).
  std::vector<std::pair<int, int>> pairs;
  FrameCounts counts;
};

inline constexpr double kCenterDistanceGate = 2.0;

// Boxes are assumed to share frame and class. Updates `assignment`.
FrameMatch match_frame(std::span<const GroundTruthBox> gt, std::span<const TrackRecord> tracks,
                       IdAssignment& assignment, double gate = kCenterDistanceGate);

// max(0, 1 - (ids + fp + fn - (1 - r) P) / (r P)), capped at 1. std::nullopt
// when P == 0 (nothing to score). Throws DomainError for r outside (0, 1].
std::optional<double> motar(std::int64_t ids, std::int64_t fp, std::int64_t fn, std::int64_t positives,
                            double recall);

struct RecallSample {
  double target_recall = 0.0;
  double achieved_recall = 0.0;
  double motar = 0.0;
  std::int64_t ids = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tp = 0;
  std::int64_t positives = 0;
  // Score threshold of the operating point; absent when unreachable.
  std::optional<double> score_threshold;
  bool reachable = false;
};

struct ClassReport {
  ObjectClass class_label = ObjectClass::kCar;
  double amota = 0.0;
  std::int64_t positives = 0;
  std::vector<RecallSample> samples;
};

struct EvalOptions {
  // Number of evaluation sample points; the grid is {1/(n-1), ..., 1}.
  int n_samples = 40;
  double gate = kCenterDistanceGate;
  // Cap on candidate score thresholds per class, chosen by score rank.
  std::size_t max_thresholds = 2000;
};

struct EvalReport {
  int n_samples = 0;
  std::vector<ClassReport> classes;
  // Unweighted mean over classes present in the ground truth.
  std::optional<double> overall_amota;

  const ClassReport* find(ObjectClass cls) const;
  nlohmann::ordered_json to_json() const;
};

// Throws DomainError when n_samples < 2.
EvalReport amota(const TrackSet& tracks, const GroundTruthSet& ground_truth,
                 const EvalOptions& options = {});

// Counts for one class at a fixed score threshold (records with score >=
// threshold are kept).
FrameCounts evaluate_at_threshold(const TrackSet& tracks, const GroundTruthSet& ground_truth,
                                  ObjectClass cls, double threshold,
                                  double gate = kCenterDistanceGate);

// "Method,Overall,bicycle,...,truck" header and one row per report, AMOTA in
// percent; classes absent from the ground truth are left empty.
std::string table_csv_header();
std::string table_csv_row(const std::string& method, const EvalReport& report);

}  // namespace mot3d
