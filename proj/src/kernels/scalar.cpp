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

#include <array>
#include <cmath>

#include "kernels_internal.hpp"
#include "mot3d/kernels.hpp"

namespace mot3d::kernels::scalar {

void mahalanobis_batch(CholeskyFactor7 chol, std::span<const double> residuals,
                       std::size_t stride, std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = detail::mahalanobis_one(chol, residuals, stride, j);
  }
}

void center_distance_batch(double px, double py, std::span<const double> xs,
                           std::span<const double> ys, std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = detail::center_distance_one(px, py, xs[j], ys[j]);
  }
}

}  // namespace mot3d::kernels::scalar
