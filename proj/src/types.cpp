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

#include "mot3d/types.hpp"

#include <cmath>
#include <numbers>

#include "mot3d/errors.hpp"

namespace mot3d {

namespace {

constexpr std::array<std::string_view, 7> kClassNames = {
    "bicycle", "bus", "car", "motorcycle", "pedestrian", "trailer", "truck",
};

}  // namespace

std::string_view to_string(ObjectClass cls) {
  return kClassNames[static_cast<std::size_t>(cls)];
}

std::optional<ObjectClass> parse_class(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) return static_cast<ObjectClass>(i);
  }
  return std::nullopt;
}

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw DomainError("wrap_angle: non-finite angle");
  }
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (theta >= -kPi && theta < kPi) return theta;
  double r = std::fmod(theta + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  // fmod rounding can land exactly on +pi.
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r = -kPi;
  return r;
}

Vector7 Observation::to_vector() const {
  Vector7 v;
  v << x, y, z, yaw, length, width, height;
  return v;
}

Observation Observation::from_vector(const Vector7& v) {
  return Observation{v[kX], v[kY], v[kZ], v[kYaw], v[kLength], v[kWidth], v[kHeight]};
}

bool Observation::valid() const {
  return to_vector().allFinite() && length > 0.0 && width > 0.0 && height > 0.0;
}

StateVector StateVector::from_observation(const Observation& obs) {
  Vector11 v = Vector11::Zero();
  v.head<kObsDim>() = obs.to_vector();
  v[kYaw] = wrap_angle(v[kYaw]);
  return StateVector(v);
}

Observation StateVector::observed() const {
  return Observation::from_vector(values_.head<kObsDim>());
}

bool StateVector::valid() const {
  return values_.allFinite() && length() > 0.0 && width() > 0.0 && height() > 0.0;
}

const Matrix11& transition_matrix() {
  static const Matrix11 a = [] {
    Matrix11 m = Matrix11::Identity();
    m(kX, kDx) = 1.0;
    m(kY, kDy) = 1.0;
    m(kZ, kDz) = 1.0;
    m(kYaw, kDyaw) = 1.0;
    return m;
  }();
  return a;
}

const Matrix7x11& observation_matrix() {
  static const Matrix7x11 h = [] {
    Matrix7x11 m = Matrix7x11::Zero();
    m.leftCols<kObsDim>().setIdentity();
    return m;
  }();
  return h;
}

StateVector apply_transition(const StateVector& state) {
  Vector11 v = state.values();
  v[kX] += v[kDx];
  v[kY] += v[kDy];
  v[kZ] += v[kDz];
  v[kYaw] = wrap_angle(v[kYaw] + v[kDyaw]);
  return StateVector(v);
}

bool is_symmetric_psd(const Eigen::Ref<const Eigen::MatrixXd>& m, double sym_tol,
                      double eig_tol) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol) return false;
  const Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  return es.eigenvalues().minCoeff() >= -eig_tol;
}

}  // namespace mot3d
