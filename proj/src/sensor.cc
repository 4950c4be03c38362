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

#include <algorithm>
#include <stdexcept>
#include <string>

namespace leadsel {
namespace {

Matrix spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
  }
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

}  // namespace

Matrix build_incidence(const NetworkGraph& g) {
  const auto& edges = g.edges();
  Matrix e = Matrix::Zero(g.num_nodes(), static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [i, j] = edges[k];
    e(std::min(i, j), k) = 1.0;
    e(std::max(i, j), k) = -1.0;
  }
  return e;
}

MeasurementModel leader_measurement_model(const NetworkGraph& g,
                                          const std::vector<int>& absolute,
                                          const Vector& kappa) {
  const int n = g.num_nodes();
  if (kappa.size() != n || !(kappa.minCoeff() > 0.0)) {
    throw std::invalid_argument(
        "leader_measurement_model: gains must be positive, one per node");
  }
  MeasurementModel model;
  model.E_r = build_incidence(g);
  model.E_a = Matrix::Zero(n, static_cast<Eigen::Index>(absolute.size()));
  for (std::size_t c = 0; c < absolute.size(); ++c) {
    if (absolute[c] < 0 || absolute[c] >= n) {
      throw std::invalid_argument(
          "leader_measurement_model: node index out of range");
    }
    model.E_a(absolute[c], c) = 1.0;
  }
  model.W_r = Matrix::Identity(model.E_r.cols(), model.E_r.cols());
  model.W_a = kappa.cwiseInverse().asDiagonal();
  return model;
}

Matrix blue_error_covariance(const MeasurementModel& model) {
  if (model.E_a.cols() == 0) {
    throw std::invalid_argument(
        "blue_error_covariance: at least one absolute measurement is needed");
  }
  const Matrix info_r =
      model.E_r * spd_inverse(model.W_r, "blue_error_covariance: W_r") *
      model.E_r.transpose();
  const Matrix wa_sel = model.E_a.transpose() * model.W_a * model.E_a;
  const Matrix info_a =
      model.E_a * spd_inverse(wa_sel, "blue_error_covariance: W_a") *
      model.E_a.transpose();
  return spd_inverse(info_r + info_a, "blue_error_covariance");
}

Matrix reference_error_covariance(const NetworkGraph& g,
                                  const std::vector<int>& references) {
  if (references.empty()) {
    throw std::invalid_argument(
        "reference_error_covariance: reference set is empty");
  }
  const Matrix e = build_incidence(g);
  const std::vector<int> rest = complement(g.num_nodes(), references);
  if (rest.empty()) {
    throw std::invalid_argument(
        "reference_error_covariance: every node is a reference");
  }
  Matrix e_f(static_cast<Eigen::Index>(rest.size()), e.cols());
  for (std::size_t r = 0; r < rest.size(); ++r) e_f.row(r) = e.row(rest[r]);
  return spd_inverse(e_f * e_f.transpose(), "reference_error_covariance");
}

}  // namespace leadsel
