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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mot3d/kernels.hpp"

namespace mot3d::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(MOT3D_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("MOT3D_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::kAvx2;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

// -1: automatic.
std::atomic<int> g_forced{-1};

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  return isa == Isa::kScalar || (isa == Isa::kAvx2 && cpu_has_avx2());
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

void force_isa(std::optional<Isa> isa) {
  if (!isa) {
    g_forced.store(-1, std::memory_order_relaxed);
    return;
  }
  if (!isa_available(*isa)) {
    throw std::invalid_argument("force_isa: " + std::string(to_string(*isa)) +
                                " is not available on this machine");
  }
  g_forced.store(static_cast<int>(*isa), std::memory_order_relaxed);
}

void mahalanobis_batch(CholeskyFactor7 chol, std::span<const double> residuals,
                       std::size_t stride, std::span<double> out) {
#if defined(MOT3D_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) {
    avx2::mahalanobis_batch(chol, residuals, stride, out);
    return;
  }
#endif
  scalar::mahalanobis_batch(chol, residuals, stride, out);
}

void center_distance_batch(double px, double py, std::span<const double> xs,
                           std::span<const double> ys, std::span<double> out) {
#if defined(MOT3D_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) {
    avx2::center_distance_batch(px, py, xs, ys, out);
    return;
  }
#endif
  scalar::center_distance_batch(px, py, xs, ys, out);
}

}  // namespace mot3d::kernels
