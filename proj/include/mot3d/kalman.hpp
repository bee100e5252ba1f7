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

#include "mot3d/types.hpp"

namespace mot3d {

/**
 * Output of the prediction step for one track.
 *
 * `predicted_observation` is H * predicted mean and `innovation_cov` is
 * S = H Sigma_hat H^T + R, the uncertainty of that predicted detection.
 */
struct Prediction {
  StateEstimate predicted_estimate;
  Observation predicted_observation;
  CovMatrix7 innovation_cov = CovMatrix7::Identity();
};

// mu_hat = A mu, Sigma_hat = A Sigma A^T + Q, o_hat = H mu_hat,
// S = H Sigma_hat H^T + R. Throws CalibrationError when Q or R is not
// symmetric PSD.
Prediction predict(const StateEstimate& estimate, const CovMatrix11& process_noise,
                   const CovMatrix7& observation_noise);

// Standard gain update against one matched observation. The yaw residual is
// wrapped before the gain is applied. Orientation correction, if wanted, must
// already be folded into `prediction` (see apply_orientation_correction).
// Throws NumericalError when S is not positive definite.
StateEstimate update(const Prediction& prediction, const Observation& matched);

// Observation residual o - o_hat with the yaw component wrapped.
Vector7 innovation(const Observation& predicted, const Observation& observed);

}  // namespace mot3d
