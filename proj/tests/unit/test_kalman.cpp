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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mot3d/errors.hpp"
#include "mot3d/kalman.hpp"
#include "oracles.hpp"

namespace mot3d {
namespace {

using oracle::Dense;

Dense to_dense(const Eigen::MatrixXd& m) {
  Dense d(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      d(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    }
  }
  return d;
}

template <int R, int C>
Eigen::Matrix<double, R, C> to_eigen(const Dense& d) {
  Eigen::Matrix<double, R, C> m;
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) m(i, j) = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return m;
}

struct Instance {
  StateEstimate estimate;
  CovMatrix11 q;
  CovMatrix7 r;
  Observation z;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> pos(0.5, 4.0);
  Instance in;
  Vector11 mean;
  for (int i = 0; i < 11; ++i) mean[i] = u(rng);
  mean[kYaw] = wrap_angle(mean[kYaw]);
  for (int i = kLength; i <= kHeight; ++i) mean[i] = pos(rng);
  in.estimate.mean = StateVector(mean);
  in.estimate.covariance = to_eigen<11, 11>(oracle::random_spd(11, rng, 0.2));
  in.q = to_eigen<11, 11>(oracle::random_diag(11, rng, 0.0, 0.5));
  in.r = to_eigen<7, 7>(oracle::random_spd(7, rng, 0.1, 0.2));
  in.z = Observation{u(rng), u(rng), u(rng), wrap_angle(u(rng)), pos(rng), pos(rng), pos(rng)};
  return in;
}

TEST(Predict, MatchesDenseOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const Instance in = random_instance(rng);
    const Prediction p = predict(in.estimate, in.q, in.r);
    const auto o = oracle::dense_predict(to_dense(in.estimate.mean.values()),
                                         to_dense(in.estimate.covariance), to_dense(in.q),
                                         to_dense(in.r));
    for (int i = 0; i < 11; ++i) {
      const double d = i == kYaw ? oracle::wrap(p.predicted_estimate.mean[i] - o.mean(3, 0))
                                 : p.predicted_estimate.mean[i] - o.mean(static_cast<std::size_t>(i), 0);
      ASSERT_NEAR(d, 0.0, 1e-12);
    }
    ASSERT_LT(oracle::max_abs_diff(to_dense(p.predicted_estimate.covariance), o.cov), 1e-12);
    ASSERT_LT(oracle::max_abs_diff(to_dense(p.innovation_cov), o.s), 1e-12);
  }
}

TEST(Update, MatchesGainFormulaAndConditioningOracles) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const Instance in = random_instance(rng);
    const Prediction p = predict(in.estimate, in.q, in.r);
    const StateEstimate u = update(p, in.z);

    // Oracles work from the library's prediction so both see the same wrapped yaw.
    oracle::DensePrediction dp{to_dense(p.predicted_estimate.mean.values()),
                               to_dense(p.predicted_estimate.covariance),
                               to_dense(p.innovation_cov)};
    const Dense z = to_dense(in.z.to_vector());
    const auto [m1, c1] = oracle::dense_update(dp, z);
    const auto [m2, c2] = oracle::condition_gaussian(dp, z);
    for (std::size_t i = 0; i < 11; ++i) {
      const auto diff = [&](const Dense& m) {
        const double d = u.mean[static_cast<int>(i)] - m(i, 0);
        return i == kYaw ? oracle::wrap(d) : d;
      };
      ASSERT_NEAR(diff(m1), 0.0, 1e-8);
      ASSERT_NEAR(diff(m2), 0.0, 1e-8);
    }
    ASSERT_LT(oracle::max_abs_diff(to_dense(u.covariance), c1), 1e-8);
    ASSERT_LT(oracle::max_abs_diff(to_dense(u.covariance), c2), 1e-8);
  }
}

TEST(Predict, CovarianceStaysSymmetricPsd) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    Instance in = random_instance(rng);
    StateEstimate e = in.estimate;
    for (int k = 0; k < 5; ++k) {
      const Prediction p = predict(e, in.q, in.r);
      ASSERT_TRUE(is_symmetric_psd(p.predicted_estimate.covariance));
      ASSERT_TRUE(is_symmetric_psd(p.innovation_cov));
      e = update(p, in.z);
      ASSERT_TRUE(e.covariance.isApprox(e.covariance.transpose(), 0.0));
      ASSERT_TRUE(is_symmetric_psd(e.covariance, 1e-9, 1e-9));
    }
  }
}

TEST(Predict, ZeroVelocityIdentityCovarianceExample) {
  StateEstimate e;
  e.mean = StateVector::from_observation(Observation{0, 0, 0, 0, 1, 1, 1});
  e.covariance = CovMatrix11::Identity();
  const Prediction p = predict(e, CovMatrix11::Zero(), CovMatrix7::Zero());
  EXPECT_EQ(p.predicted_estimate.mean, e.mean);
  // Position entries pick up the velocity variance.
  EXPECT_DOUBLE_EQ(p.predicted_estimate.covariance(kX, kX), 2.0);
  EXPECT_DOUBLE_EQ(p.predicted_estimate.covariance(kX, kDx), 1.0);
  EXPECT_DOUBLE_EQ(p.predicted_estimate.covariance(kLength, kLength), 1.0);
}

TEST(Update, ExactObservationWithZeroNoiseIsReproduced) {
  StateEstimate e;
  e.mean = StateVector::from_observation(Observation{1, 2, 0, 0.3, 4, 2, 1.5});
  e.covariance = CovMatrix11::Identity();
  const Prediction p = predict(e, CovMatrix11::Zero(), CovMatrix7::Zero());
  const Observation z{1.5, 2.5, 0, 0.4, 4, 2, 1.5};
  const StateEstimate u = update(p, z);
  const Observation got = u.mean.observed();
  EXPECT_NEAR(got.x, z.x, 1e-12);
  EXPECT_NEAR(got.y, z.y, 1e-12);
  EXPECT_NEAR(got.yaw, z.yaw, 1e-12);
  // Observed block collapses to zero variance.
  const double observed_var = u.covariance.topLeftCorner<7, 7>().cwiseAbs().maxCoeff();
  EXPECT_NEAR(observed_var, 0.0, 1e-12);
}

TEST(Update, YawResidualIsWrapped) {
  constexpr double kPi = std::numbers::pi;
  StateEstimate e;
  e.mean = StateVector::from_observation(Observation{0, 0, 0, kPi - 0.05, 1, 1, 1});
  e.covariance = CovMatrix11::Identity();
  const Prediction p = predict(e, CovMatrix11::Zero(), CovMatrix7::Identity());
  const StateEstimate u = update(p, Observation{0, 0, 0, -kPi + 0.05, 1, 1, 1});
  // Halfway across the seam, not halfway around the circle.
  EXPECT_NEAR(std::abs(u.mean.yaw()), kPi, 0.06);
  EXPECT_NEAR(innovation(p.predicted_observation, Observation{0, 0, 0, -kPi + 0.05, 1, 1, 1})[kYaw],
              0.1, 1e-12);
}

TEST(Predict, RejectsInvalidNoise) {
  StateEstimate e;
  CovMatrix11 q = CovMatrix11::Zero();
  q(0, 0) = -1.0;
  EXPECT_THROW(predict(e, q, CovMatrix7::Identity()), CalibrationError);
  CovMatrix7 r = CovMatrix7::Identity();
  r(0, 1) = 2.0;
  EXPECT_THROW(predict(e, CovMatrix11::Zero(), r), CalibrationError);
  r = CovMatrix7::Identity();
  r(1, 1) = std::nan("");
  EXPECT_THROW(predict(e, CovMatrix11::Zero(), r), CalibrationError);
}

TEST(Update, SingularInnovationThrowsNumericalError) {
  StateEstimate e;
  e.covariance = CovMatrix11::Zero();
  const Prediction p = predict(e, CovMatrix11::Zero(), CovMatrix7::Zero());
  try {
    update(p, Observation{});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& err) {
    EXPECT_LE(err.rcond(), 0.0);
  }
}

}  // namespace
}  // namespace mot3d
