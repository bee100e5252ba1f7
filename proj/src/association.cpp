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

#include "mot3d/association.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "mot3d/errors.hpp"
#include "mot3d/geometry.hpp"
#include "mot3d/kernels.hpp"

namespace mot3d {

namespace {

using RowMajor7 = Eigen::Matrix<double, kObsDim, kObsDim, Eigen::RowMajor>;

RowMajor7 cholesky_lower(const CovMatrix7& s) {
  Eigen::LLT<Matrix7> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mahalanobis: innovation covariance is not positive definite", 0.0);
  }
  return RowMajor7(llt.matrixL());
}

void require_distance(const AffinityMatrix& m, const char* who) {
  if (m.kind != AffinityKind::kMahalanobisDistance) {
    throw ConfigError(std::string(who) + ": expects a distance matrix; convert IOU with iou_as_distance");
  }
}

// Fills the unmatched index lists from the chosen pairs.
MatchResult finish(std::vector<MatchPair> pairs, int rows, int cols) {
  MatchResult out;
  std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
  for (const auto& p : pairs) {
    row_used[static_cast<std::size_t>(p.prediction)] = 1;
    col_used[static_cast<std::size_t>(p.detection)] = 1;
  }
  for (int i = 0; i < rows; ++i) {
    if (!row_used[static_cast<std::size_t>(i)]) out.unmatched_predictions.push_back(i);
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_used[static_cast<std::size_t>(j)]) out.unmatched_detections.push_back(j);
  }
  out.pairs = std::move(pairs);
  return out;
}

// Shortest augmenting path assignment with potentials for an n x m cost
// matrix, n <= m. Returns the column assigned to each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

}  // namespace

double orientation_correct(double predicted_angle, double detected_angle) {
  const double delta = std::abs(wrap_angle(detected_angle - predicted_angle));
  if (delta > 0.5 * std::numbers::pi) {
    return wrap_angle(predicted_angle + std::numbers::pi);
  }
  return predicted_angle;
}

Prediction apply_orientation_correction(const Prediction& prediction,
                                        const Observation& detection) {
  const double corrected =
      orientation_correct(prediction.predicted_observation.yaw, detection.yaw);
  if (corrected == prediction.predicted_observation.yaw) return prediction;
  Prediction out = prediction;
  out.predicted_observation.yaw = corrected;
  out.predicted_estimate.mean[kYaw] = corrected;
  return out;
}

double mahalanobis(const Prediction& prediction, const Observation& detection) {
  Eigen::LLT<Matrix7> llt(prediction.innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mahalanobis: innovation covariance is not positive definite",
                         0.0);
  }
  const Vector7 nu = innovation(prediction.predicted_observation, detection);
  const Vector7 y = llt.matrixL().solve(nu);
  return std::sqrt(y.squaredNorm());
}

double iou_3d(const Observation& a, const Observation& b) {
  const double dz = geometry::height_overlap(a, b);
  if (dz <= 0.0) return 0.0;
  const double area = geometry::footprint_overlap_area(a, b);
  const double inter = area * dz;
  const double vol_a = a.length * a.width * a.height;
  const double vol_b = b.length * b.width * b.height;
  const double uni = vol_a + vol_b - inter;
  // Numerically empty overlap.
  if (!(inter > 1e-12 * std::max(vol_a, vol_b)) || !(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

AffinityMatrix mahalanobis_affinity(std::span<const Prediction> predictions,
                                    std::span<const Observation> detections) {
  const std::size_t m = predictions.size();
  const std::size_t n = detections.size();
  AffinityMatrix out;
  out.kind = AffinityKind::kMahalanobisDistance;
  out.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  if (m == 0 || n == 0) return out;

  std::vector<double> residuals(kObsDim * n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    const Prediction& pred = predictions[i];
    const RowMajor7 l = cholesky_lower(pred.innovation_cov);
    const Vector7 o_hat = pred.predicted_observation.to_vector();
    for (std::size_t j = 0; j < n; ++j) {
      const Observation& det = detections[j];
      const Vector7 o = det.to_vector();
      const double yaw = orientation_correct(o_hat[kYaw], det.yaw);
      for (int k = 0; k < kObsDim; ++k) {
        residuals[static_cast<std::size_t>(k) * n + j] = o[k] - o_hat[k];
      }
      residuals[static_cast<std::size_t>(kYaw) * n + j] = wrap_angle(det.yaw - yaw);
    }
    kernels::mahalanobis_batch(kernels::CholeskyFactor7(l.data(), 49), residuals, n, row);
    for (std::size_t j = 0; j < n; ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return out;
}

AffinityMatrix iou_affinity(std::span<const Prediction> predictions,
                            std::span<const Observation> detections) {
  AffinityMatrix out;
  out.kind = AffinityKind::kIouScore;
  out.values.resize(static_cast<Eigen::Index>(predictions.size()),
                    static_cast<Eigen::Index>(detections.size()));
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t j = 0; j < detections.size(); ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          iou_3d(predictions[i].predicted_observation, detections[j]);
    }
  }
  return out;
}

AffinityMatrix iou_as_distance(const AffinityMatrix& iou) {
  if (iou.kind != AffinityKind::kIouScore) {
    throw ConfigError("iou_as_distance: expects an IOU score matrix");
  }
  AffinityMatrix out;
  out.kind = AffinityKind::kMahalanobisDistance;
  out.values = (1.0 - iou.values.array()).matrix();
  return out;
}

MatchResult greedy_match(const AffinityMatrix& distances, double threshold) {
  require_distance(distances, "greedy_match");
  const int rows = distances.rows();
  const int cols = distances.cols();

  std::vector<std::tuple<double, int, int>> order;
  order.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) order.emplace_back(distances.values(i, j), i, j);
  }
  std::sort(order.begin(), order.end());

  std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
  std::vector<MatchPair> pairs;
  for (const auto& [d, i, j] : order) {
    if (row_used[static_cast<std::size_t>(i)] || col_used[static_cast<std::size_t>(j)]) continue;
    if (!(d < threshold)) break;
    pairs.push_back({i, j, d});
    row_used[static_cast<std::size_t>(i)] = 1;
    col_used[static_cast<std::size_t>(j)] = 1;
  }
  return finish(std::move(pairs), rows, cols);
}

MatchResult hungarian_match(const AffinityMatrix& distances, double threshold) {
  require_distance(distances, "hungarian_match");
  const int rows = distances.rows();
  const int cols = distances.cols();
  if (rows == 0 || cols == 0) return finish({}, rows, cols);

  // Unmatchable entries become a finite cost larger than any complete
  // assignment of finite entries, so they are used only when unavoidable.
  double finite_sum = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double d = distances.values(i, j);
      if (std::isfinite(d)) finite_sum += std::abs(d);
    }
  }
  const double big = 2.0 * finite_sum + 1.0;
  Eigen::MatrixXd cost = distances.values.unaryExpr(
      [big](double d) { return std::isfinite(d) ? d : big; });

  const bool transposed = rows > cols;
  if (transposed) cost.transposeInPlace();
  const std::vector<int> assignment = solve_assignment(cost);

  std::vector<MatchPair> pairs;
  for (int r = 0; r < static_cast<int>(assignment.size()); ++r) {
    const int c = assignment[static_cast<std::size_t>(r)];
    if (c < 0) continue;
    const int i = transposed ? c : r;
    const int j = transposed ? r : c;
    const double d = distances.values(i, j);
    if (d < threshold) pairs.push_back({i, j, d});
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchPair& a, const MatchPair& b) {
    return std::tie(a.affinity, a.prediction, a.detection) <
           std::tie(b.affinity, b.prediction, b.detection);
  });
  return finish(std::move(pairs), rows, cols);
}

MatchResult match_by_center_distance(std::span<const Observation> rows,
                                     std::span<const Observation> cols, double gate) {
  AffinityMatrix d;
  d.kind = AffinityKind::kMahalanobisDistance;
  d.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  if (!rows.empty() && !cols.empty()) {
    std::vector<double> xs(cols.size()), ys(cols.size()), out(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      xs[j] = cols[j].x;
      ys[j] = cols[j].y;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      kernels::center_distance_batch(rows[i].x, rows[i].y, xs, ys, out);
      for (std::size_t j = 0; j < cols.size(); ++j) {
        d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = out[j];
      }
    }
  }
  return greedy_match(d, gate);
}

}  // namespace mot3d
