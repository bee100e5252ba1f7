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

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "mot3d/kernels.hpp"

namespace mot3d::kernels::detail {

constexpr std::size_t kDim = kMahalanobisDim;

// Single-column reference; the vector variants use it for their tails and must
// match its operation order exactly.
inline double mahalanobis_one(CholeskyFactor7 chol, std::span<const double> residuals,
                              std::size_t stride, std::size_t j) {
  std::array<double, kDim> y{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kDim; ++k) {
    double acc = residuals[k * stride + j];
    for (std::size_t i = 0; i < k; ++i) {
      acc = acc - chol[k * kDim + i] * y[i];
    }
    y[k] = acc / chol[k * kDim + k];
    sum = sum + y[k] * y[k];
  }
  return std::sqrt(sum);
}

inline double center_distance_one(double px, double py, double x, double y) {
  const double dx = x - px;
  const double dy = y - py;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace mot3d::kernels::detail
