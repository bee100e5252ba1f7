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

// Compiled with -mavx2 only. FMA is deliberately not enabled for this file so
// that mul/add pairs round exactly like the scalar reference.

#include <immintrin.h>

#include <array>

#include "kernels_internal.hpp"
#include "mot3d/kernels.hpp"

namespace mot3d::kernels::avx2 {

namespace {
constexpr std::size_t kLanes = 4;
}  // namespace

void mahalanobis_batch(CholeskyFactor7 chol, std::span<const double> residuals,
                       std::size_t stride, std::span<double> out) {
  using detail::kDim;
  const std::size_t n = out.size();
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    __m256d y[kDim];
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t k = 0; k < kDim; ++k) {
      __m256d acc = _mm256_loadu_pd(residuals.data() + k * stride + j);
      for (std::size_t i = 0; i < k; ++i) {
        const __m256d l = _mm256_set1_pd(chol[k * kDim + i]);
        acc = _mm256_sub_pd(acc, _mm256_mul_pd(l, y[i]));
      }
      y[k] = _mm256_div_pd(acc, _mm256_set1_pd(chol[k * kDim + k]));
      sum = _mm256_add_pd(sum, _mm256_mul_pd(y[k], y[k]));
    }
    _mm256_storeu_pd(out.data() + j, _mm256_sqrt_pd(sum));
  }
  for (; j < n; ++j) {
    out[j] = detail::mahalanobis_one(chol, residuals, stride, j);
  }
}

void center_distance_batch(double px, double py, std::span<const double> xs,
                           std::span<const double> ys, std::span<double> out) {
  const std::size_t n = out.size();
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + j), vpx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + j), vpy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out.data() + j, _mm256_sqrt_pd(d2));
  }
  for (; j < n; ++j) {
    out[j] = detail::center_distance_one(px, py, xs[j], ys[j]);
  }
}

}  // namespace mot3d::kernels::avx2
