// Copyright 2026 The Authors.
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

#include "leadsel/sensor.h"

#include <gtest/gtest.h>

#include "leadsel/noise_corrupted.h"
#include "leadsel/noise_free.h"
#include "test_support.h"

namespace leadsel {
namespace {

using ::leadsel::testing::path_graph;
using ::leadsel::testing::random_connected_graph;
using ::leadsel::testing::random_gains;
using ::leadsel::testing::random_subset;
using ::leadsel::testing::uniform_int;

// Best linear unbiased estimate of psi from stacked measurements
// [E_r^T; E_a^T] psi + noise: generalized least squares with the block
// diagonal covariance. Test-only; the library exposes the covariance only.
Vector blue_estimate(const MeasurementModel& m, const Vector& y_r,
                     const Vector& y_a) {
  const Matrix wa_sel = m.E_a.transpose() * m.W_a * m.E_a;
  const Matrix info = m.E_r * m.W_r.inverse() * m.E_r.transpose() +
                      m.E_a * wa_sel.inverse() * m.E_a.transpose();
  const Vector rhs = m.E_r * m.W_r.inverse() * y_r +
                     m.E_a * wa_sel.inverse() * y_a;
  return info.ldlt().solve(rhs);
}

TEST(IncidenceTest, TwoPath) {
  const Matrix e = build_incidence(path_graph(2));
  EXPECT_EQ(e, (Matrix(2, 1) << 1, -1).finished());
}

TEST(IncidenceTest, ThreePathColumnsSumToZero) {
  const Matrix e = build_incidence(path_graph(3));
  EXPECT_EQ(e.rows(), 3);
  EXPECT_EQ(e.cols(), 2);
  EXPECT_EQ(e.colwise().sum().cwiseAbs().maxCoeff(), 0.0);
}

TEST(IncidenceTest, ReproducesLaplacianExactly) {
  Rng rng(71);
  for (int t = 0; t < 30; ++t) {
    const NetworkGraph g = random_connected_graph(uniform_int(rng, 2, 30), 0.2, rng);
    const Matrix e = build_incidence(g);
    EXPECT_EQ(e * e.transpose(), laplacian(g).matrix());
  }
}

TEST(BlueCovarianceTest, TwoPathUnitNoise) {
  const MeasurementModel m =
      leader_measurement_model(path_graph(2), {0}, uniform_gains(2));
  const Matrix s = blue_error_covariance(m);
  EXPECT_LT((s - (Matrix(2, 2) << 1, 1, 1, 2).finished()).norm(), 1e-14);
  EXPECT_NEAR(s.trace(), 3.0, 1e-14);
}

TEST(BlueCovarianceTest, NeedsAbsoluteMeasurement) {
  MeasurementModel m =
      leader_measurement_model(path_graph(3), {}, uniform_gains(3));
  EXPECT_THROW(blue_error_covariance(m), std::invalid_argument);
}

TEST(BlueCovarianceTest, RelativeNoiseScaling) {
  const NetworkGraph g = build_lattice(2, 3);
  MeasurementModel m = leader_measurement_model(g, {2}, uniform_gains(6, 2.0));
  const Matrix base_info = blue_error_covariance(m).inverse();
  const double c = 4.0;
  m.W_r *= c;
  const Matrix scaled_info = blue_error_covariance(m).inverse();
  const Matrix relative = laplacian(g).matrix();
  EXPECT_LT((base_info - scaled_info - (1.0 - 1.0 / c) * relative).norm(), 1e-10);
}

TEST(BlueCovarianceTest, MatchesLeaderObjective) {
  Rng rng(72);
  for (int t = 0; t < 50; ++t) {
    const int n = uniform_int(rng, 2, 15);
    const NetworkGraph g = random_connected_graph(n, 0.25, rng);
    const Vector k = random_gains(n, rng);
    const std::vector<int> s = random_subset(n, uniform_int(rng, 1, n - 1), rng);
    const double j = evaluate_J(laplacian(g), LeaderSelection(n, s, k));
    const Matrix cov = blue_error_covariance(leader_measurement_model(g, s, k));
    EXPECT_NEAR(cov.trace(), j, 1e-9 * j);
  }
}

TEST(BlueCovarianceTest, EmpiricalCovarianceOfEstimator) {
  // The estimator's error over many noise draws has the stated covariance.
  const NetworkGraph g = path_graph(3);
  const Vector k = (Vector(3) << 2.0, 1.0, 1.0).finished();
  const MeasurementModel m = leader_measurement_model(g, {0}, k);
  const Matrix expected = blue_error_covariance(m);
  const Vector psi = (Vector(3) << 0.3, -1.0, 2.0).finished();
  Rng rng(73);
  Matrix acc = Matrix::Zero(3, 3);
  const int draws = 200000;
  for (int d = 0; d < draws; ++d) {
    Vector y_r = m.E_r.transpose() * psi;
    for (Eigen::Index r = 0; r < y_r.size(); ++r) y_r(r) += rng.normal();
    Vector y_a = m.E_a.transpose() * psi;
    y_a(0) += std::sqrt(1.0 / k(0)) * rng.normal();
    const Vector err = blue_estimate(m, y_r, y_a) - psi;
    acc += err * err.transpose();
  }
  acc /= draws;
  EXPECT_LT((acc - expected).norm(), 0.02 * expected.norm());
}

TEST(ReferenceCovarianceTest, Examples) {
  EXPECT_LT((reference_error_covariance(path_graph(3), {1}) -
             Matrix::Identity(2, 2))
                .norm(),
            1e-14);
  EXPECT_NEAR(reference_error_covariance(path_graph(2), {0})(0, 0), 1.0, 1e-14);
  EXPECT_THROW(reference_error_covariance(path_graph(3), {}),
               std::invalid_argument);
}

TEST(ReferenceCovarianceTest, MatchesNoiseFreeObjective) {
  Rng rng(74);
  for (int t = 0; t < 50; ++t) {
    const int n = uniform_int(rng, 2, 15);
    const NetworkGraph g = random_connected_graph(n, 0.25, rng);
    const std::vector<int> s = random_subset(n, uniform_int(rng, 1, n - 1), rng);
    const double jf = evaluate_Jf(laplacian(g), s);
    EXPECT_NEAR(reference_error_covariance(g, s).trace(), jf, 1e-10 * jf);
  }
}

}  // namespace
}  // namespace leadsel
