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

// Sensor-placement view of leader selection.
//
// Nodes are sensors with scalar positions psi. Every edge carries a noisy
// relative measurement E_r^T psi + w_r, and the sensors in an absolute set
// also measure their own position. The covariance of the best linear unbiased
// estimate then coincides with the leader-selection objectives.

#ifndef LEADSEL_SENSOR_H_
#define LEADSEL_SENSOR_H_

#include <vector>

#include "leadsel/common.h"
#include "leadsel/graph.h"

namespace leadsel {

// n x |E| incidence matrix: for edge (i, j), i < j, the column is e_i - e_j.
Matrix build_incidence(const NetworkGraph& g);

struct MeasurementModel {
  Matrix E_r;  // n x m relative incidence
  Matrix E_a;  // n x k selector, columns e_i for the absolute set
  Matrix W_r;  // m x m relative noise covariance
  Matrix W_a;  // n x n absolute noise covariance (only the selected block
               // E_a^T W_a E_a is used)
};

// Absolute set `absolute` with W_r = I and W_a = diag(1 / kappa).
MeasurementModel leader_measurement_model(const NetworkGraph& g,
                                          const std::vector<int>& absolute,
                                          const Vector& kappa);

// (E_r W_r^{-1} E_r^T + E_a (E_a^T W_a E_a)^{-1} E_a^T)^{-1}. Throws
// std::invalid_argument without absolute measurements and NumericalError when
// the information matrix is singular.
Matrix blue_error_covariance(const MeasurementModel& model);

// Covariance (E_f E_f^T)^{-1} of the non-reference sensors when the
// reference sensors know their position exactly; E_f E_f^T is the grounded
// Laplacian.
Matrix reference_error_covariance(const NetworkGraph& g,
                                  const std::vector<int>& references);

}  // namespace leadsel

#endif  // LEADSEL_SENSOR_H_
