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

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

#include "mot3d/kalman.hpp"
#include "mot3d/types.hpp"

namespace mot3d {

// sqrt of the 0.95 chi-square quantile with 7 degrees of freedom.
inline constexpr double kDefaultMahalanobisGate = 3.7506186755440987;

inline constexpr double kUnmatchable = std::numeric_limits<double>::infinity();

enum class AffinityKind { kMahalanobisDistance, kIouScore };

// M predictions x N detections. Distances: lower is better, +inf marks a pair
// that can never match. IOU scores: higher is better, in [0, 1].
struct AffinityMatrix {
  Eigen::MatrixXd values;
  AffinityKind kind = AffinityKind::kMahalanobisDistance;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

struct MatchPair {
  int prediction = 0;
  int detection = 0;
  double affinity = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<int> unmatched_predictions;
  std::vector<int> unmatched_detections;
};

// Returns the predicted yaw, flipped by pi when it disagrees with the detected
// yaw by more than 90 degrees (a detector heading flip).
double orientation_correct(double predicted_angle, double detected_angle);

// Rewrites the predicted yaw of `prediction` (state mean and predicted
// observation) with orientation_correct against `detection`.
Prediction apply_orientation_correction(const Prediction& prediction, const Observation& detection);

// sqrt(nu^T S^-1 nu) with nu = detection - o_hat, yaw wrapped. No orientation
// correction is applied here. Throws NumericalError for non-SPD S.
double mahalanobis(const Prediction& prediction, const Observation& detection);

// Oriented 3D box IOU: footprint polygon intersection times vertical overlap.
double iou_3d(const Observation& a, const Observation& b);

// Orientation-corrected Mahalanobis distances for every prediction/detection
// pair, using the batched kernels.
AffinityMatrix mahalanobis_affinity(std::span<const Prediction> predictions,
                                    std::span<const Observation> detections);

AffinityMatrix iou_affinity(std::span<const Prediction> predictions,
                            std::span<const Observation> detections);

// 1 - IOU, so IOU scores can go through the distance matchers with threshold
// 1 - iou_threshold.
AffinityMatrix iou_as_distance(const AffinityMatrix& iou);

// Greedy matching: pairs taken in ascending distance order (ties broken by
// row then column), skipping used rows/columns, stopping at the first
// candidate whose distance is not below `threshold`. Requires a distance
// matrix (throws ConfigError otherwise). Pairs are returned sorted by
// distance.
MatchResult greedy_match(const AffinityMatrix& distances, double threshold);

// Minimum-total-cost rectangular assignment, then pairs with distance >=
// threshold are dropped. Requires a distance matrix.
MatchResult hungarian_match(const AffinityMatrix& distances, double threshold);

// One-to-one greedy matching on 2D (x, y) center distance with a strict gate,
// the matching rule used by calibration and evaluation.
MatchResult match_by_center_distance(std::span<const Observation> rows,
                                     std::span<const Observation> cols, double gate);

}  // namespace mot3d
