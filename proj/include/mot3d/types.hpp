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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mot3d {

inline constexpr int kStateDim = 11;
inline constexpr int kObsDim = 7;

using Vector11 = Eigen::Matrix<double, kStateDim, 1>;
using Vector7 = Eigen::Matrix<double, kObsDim, 1>;
using Matrix11 = Eigen::Matrix<double, kStateDim, kStateDim>;
using Matrix7 = Eigen::Matrix<double, kObsDim, kObsDim>;
using Matrix7x11 = Eigen::Matrix<double, kObsDim, kStateDim>;
using Matrix11x7 = Eigen::Matrix<double, kStateDim, kObsDim>;

using CovMatrix11 = Matrix11;
using CovMatrix7 = Matrix7;

// Component layout of the 11-D state. The first seven entries are the
// observed ones, in the same order as Observation::to_vector().
enum StateIndex : int {
  kX = 0,
  kY = 1,
  kZ = 2,
  kYaw = 3,
  kLength = 4,
  kWidth = 5,
  kHeight = 6,
  kDx = 7,
  kDy = 8,
  kDz = 9,
  kDyaw = 10,
};

enum class ObjectClass : std::uint8_t {
  kBicycle,
  kBus,
  kCar,
  kMotorcycle,
  kPedestrian,
  kTrailer,
  kTruck,
};

inline constexpr std::array<ObjectClass, 7> kAllClasses = {
    ObjectClass::kBicycle,    ObjectClass::kBus,     ObjectClass::kCar,
    ObjectClass::kMotorcycle, ObjectClass::kPedestrian, ObjectClass::kTrailer,
    ObjectClass::kTruck,
};

std::string_view to_string(ObjectClass cls);
std::optional<ObjectClass> parse_class(std::string_view name);

// Wraps into [-pi, pi). Throws DomainError on non-finite input.
double wrap_angle(double theta);

// Box pose and size, as produced by a detector.
struct Observation {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;

  Vector7 to_vector() const;
  static Observation from_vector(const Vector7& v);

  // Positive sizes, finite values. Yaw range is not checked.
  bool valid() const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Detection {
  Observation observation;
  ObjectClass class_label = ObjectClass::kCar;
  double score = 1.0;
  std::int64_t frame_index = 0;
  std::string scene_id;

  friend bool operator==(const Detection&, const Detection&) = default;
};

class StateVector {
 public:
  StateVector() { values_.setZero(); values_[kLength] = values_[kWidth] = values_[kHeight] = 1.0; }
  explicit StateVector(const Vector11& values) : values_(values) {}

  // Observation followed by zero velocities.
  static StateVector from_observation(const Observation& obs);

  const Vector11& values() const { return values_; }
  Vector11& values() { return values_; }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }

  double x() const { return values_[kX]; }
  double y() const { return values_[kY]; }
  double z() const { return values_[kZ]; }
  double yaw() const { return values_[kYaw]; }
  double length() const { return values_[kLength]; }
  double width() const { return values_[kWidth]; }
  double height() const { return values_[kHeight]; }
  double dx() const { return values_[kDx]; }
  double dy() const { return values_[kDy]; }
  double dz() const { return values_[kDz]; }
  double dyaw() const { return values_[kDyaw]; }

  Observation observed() const;
  bool valid() const;

  friend bool operator==(const StateVector& a, const StateVector& b) { return a.values_ == b.values_; }

 private:
  Vector11 values_;
};

struct StateEstimate {
  StateVector mean;
  CovMatrix11 covariance = CovMatrix11::Identity();
};

// Constant linear/angular velocity process model.
const Matrix11& transition_matrix();
// [I7 | 0].
const Matrix7x11& observation_matrix();

// Noise-free mean propagation; yaw re-wrapped.
StateVector apply_transition(const StateVector& state);

template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& m) {
  return (0.5 * (m + m.transpose())).eval();
}

// Symmetric within `sym_tol` and every eigenvalue of the symmetrized matrix is
// >= -eig_tol.
bool is_symmetric_psd(const Eigen::Ref<const Eigen::MatrixXd>& m, double sym_tol = 1e-9,
                      double eig_tol = 1e-9);

}  // namespace mot3d
