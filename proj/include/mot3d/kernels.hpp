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

// Batched inner loops of the affinity computations.
//
// Every kernel exists as a portable scalar reference and, where the target
// supports it, an AVX2 variant. The AVX2 variants perform the same IEEE
// operations in the same order as the scalar ones (no FMA contraction), so the
// two are bit-identical and selection by CPU features never changes results.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace mot3d::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

// Whether the running CPU and this build support `isa`.
bool isa_available(Isa isa);

// Widest available ISA, unless overridden by force_isa() or the MOT3D_ISA
// environment variable ("scalar" / "avx2").
Isa active_isa();

// Pins dispatch to `isa` (std::nullopt restores automatic selection). Throws
// std::invalid_argument if `isa` is unavailable. Not thread-safe with
// concurrent kernel calls; intended for tests and the CLI.
void force_isa(std::optional<Isa> isa);

inline constexpr std::size_t kMahalanobisDim = 7;

// Lower-triangular Cholesky factor L (row-major 7x7) of an innovation
// covariance S = L L^T.
using CholeskyFactor7 = std::span<const double, kMahalanobisDim * kMahalanobisDim>;

// For residual column j of the structure-of-arrays block `residuals`
// (component k of column j at residuals[k * stride + j]) writes
// out[j] = sqrt(r_j^T S^-1 r_j), computed through forward substitution.
void mahalanobis_batch(CholeskyFactor7 chol, std::span<const double> residuals,
                       std::size_t stride, std::span<double> out);

// out[j] = sqrt((xs[j] - px)^2 + (ys[j] - py)^2).
void center_distance_batch(double px, double py, std::span<const double> xs,
                           std::span<const double> ys, std::span<double> out);

namespace scalar {
void mahalanobis_batch(CholeskyFactor7 chol, std::span<const double> residuals,
                       std::size_t stride, std::span<double> out);
void center_distance_batch(double px, double py, std::span<const double> xs,
                           std::span<const double> ys, std::span<double> out);
}  // namespace scalar

#if defined(MOT3D_HAVE_AVX2)
namespace avx2 {
void mahalanobis_batch(CholeskyFactor7 chol, std::span<const double> residuals,
                       std::size_t stride, std::span<double> out);
void center_distance_batch(double px, double py, std::span<const double> xs,
                           std::span<const double> ys, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace mot3d::kernels
