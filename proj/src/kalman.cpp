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

#include "mot3d/kalman.hpp"

#include <string>

#include "mot3d/errors.hpp"

namespace mot3d {

namespace {

// Diagonal noise is the common case; skip the eigen solve for it.
template <typename M>
bool noise_is_valid(const M& m) {
  const bool diagonal = (m - M(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal) {
    return m.allFinite() && m.diagonal().minCoeff() >= 0.0;
  }
  return is_symmetric_psd(m);
}

}  // namespace

Prediction predict(const StateEstimate& estimate, const CovMatrix11& process_noise,
                   const CovMatrix7& observation_noise) {
  if (!noise_is_valid(process_noise)) {
    throw CalibrationError("predict: process noise Q is not symmetric PSD");
  }
  if (!noise_is_valid(observation_noise)) {
    throw CalibrationError("predict: observation noise R is not symmetric PSD");
  }
  const Matrix11& a = transition_matrix();

  Prediction out;
  out.predicted_estimate.mean = apply_transition(estimate.mean);
  out.predicted_estimate.covariance =
      symmetrize(a * estimate.covariance * a.transpose() + process_noise);
  out.predicted_observation = out.predicted_estimate.mean.observed();
  // H selects the leading 7x7 block.
  out.innovation_cov = symmetrize(
      out.predicted_estimate.covariance.topLeftCorner<kObsDim, kObsDim>() + observation_noise);
  return out;
}

Vector7 innovation(const Observation& predicted, const Observation& observed) {
  Vector7 nu = observed.to_vector() - predicted.to_vector();
  nu[kYaw] = wrap_angle(nu[kYaw]);
  return nu;
}

StateEstimate update(const Prediction& prediction, const Observation& matched) {
  const CovMatrix7& s = prediction.innovation_cov;
  Eigen::LLT<Matrix7> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("update: innovation covariance is not positive definite", 0.0);
  }
  const double rcond = llt.rcond();
  if (!(rcond > 0.0)) {
    throw NumericalError("update: innovation covariance is singular (rcond=" +
                             std::to_string(rcond) + ")",
                         rcond);
  }

  const Matrix11& sigma_hat = prediction.predicted_estimate.covariance;
  // Sigma_hat H^T is the left 11x7 block since H = [I | 0].
  const Matrix11x7 cross = sigma_hat.leftCols<kObsDim>();
  // K^T = S^-1 (H Sigma_hat) because both S and Sigma_hat are symmetric.
  const Matrix11x7 gain = llt.solve(cross.transpose()).transpose();

  const Vector7 nu = innovation(prediction.predicted_observation, matched);

  StateEstimate out;
  Vector11 mean = prediction.predicted_estimate.mean.values() + gain * nu;
  mean[kYaw] = wrap_angle(mean[kYaw]);
  out.mean = StateVector(mean);

  Matrix11 i_kh = Matrix11::Identity();
  i_kh.leftCols<kObsDim>() -= gain;
  out.covariance = symmetrize(i_kh * sigma_hat);
  return out;
}

}  // namespace mot3d
