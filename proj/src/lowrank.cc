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

#include "leadsel/lowrank.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace leadsel {
namespace {

Matrix direct_inverse(const Matrix& defining) {
  Eigen::LLT<Matrix> llt(defining);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("defining matrix is not positive definite");
  }
  return llt.solve(Matrix::Identity(defining.rows(), defining.cols()));
}

void check_index(const InverseState& s, int i, const char* what) {
  if (i < 0 || i >= s.size()) {
    throw std::invalid_argument(std::string(what) + ": index out of range");
  }
}

// Solves the 2x2 capacitance system; throws if it is numerically singular.
Eigen::Matrix2d invert_capacitance(const Eigen::Matrix2d& k, const char* what) {
  const double det = k.determinant();
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if (!std::isfinite(det) || std::abs(det) <= 1e-13 * scale * scale) {
    throw NumericalError(std::string(what) +
                         ": singular 2x2 capacitance matrix");
  }
  return k.inverse();
}

// m * xi, skipping the zero entries of xi (xi follows the graph's sparsity).
Vector times_sparse(const Matrix& m, const Vector& xi) {
  Vector out = Vector::Zero(m.rows());
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    if (xi(k) != 0.0) out.noalias() += xi(k) * m.col(k);
  }
  return out;
}

}  // namespace

InverseState::InverseState(Matrix defining, Provenance provenance)
    : defining_(std::move(defining)), provenance_(provenance) {
  if (defining_.rows() != defining_.cols() || defining_.rows() == 0) {
    throw std::invalid_argument("InverseState: defining matrix must be square");
  }
  inverse_ = direct_inverse(defining_);
  finish_update();
  updates_since_refresh_ = 0;
}

InverseState::InverseState(Matrix defining, Matrix inverse,
                           Provenance provenance, int updates)
    : defining_(std::move(defining)), inverse_(std::move(inverse)),
      provenance_(provenance), updates_since_refresh_(updates) {}

void InverseState::finish_update() {
  const Eigen::Index n = inverse_.rows();
  double asym = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double a = inverse_(r, c);
      const double b = inverse_(c, r);
      asym = std::max(asym, std::abs(a - b));
      const double avg = 0.5 * (a + b);
      inverse_(r, c) = avg;
      inverse_(c, r) = avg;
    }
  }
  const double scale = inverse_.diagonal().cwiseAbs().maxCoeff();
  const bool sane = std::isfinite(scale) && inverse_.diagonal().minCoeff() > 0.0 &&
                    asym <= 1e-10 * std::max(scale, 1.0);
  ++updates_since_refresh_;
  if (!sane || updates_since_refresh_ >= kRefreshInterval) refresh();
}

void InverseState::refresh() {
  inverse_ = direct_inverse(defining_);
  const Eigen::Index n = inverse_.rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double avg = 0.5 * (inverse_(r, c) + inverse_(c, r));
      inverse_(r, c) = avg;
      inverse_(c, r) = avg;
    }
  }
  updates_since_refresh_ = 0;
}

InverseState rank1_add_inverse(InverseState state, int i, double kappa) {
  check_index(state, i, "rank1_add_inverse");
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("rank1_add_inverse: gain must be positive");
  }
  const Vector col = state.inverse_.col(i);
  const double denom = 1.0 + kappa * col(i);
  if (!(denom > 1e-14)) {
    throw NumericalError("rank1_add_inverse: non-positive denominator");
  }
  state.inverse_.noalias() -= (kappa / denom) * col * col.transpose();
  state.defining_(i, i) += kappa;
  state.finish_update();
  return state;
}

double rank1_add_trace(const InverseState& state, int i, double kappa) {
  const auto col = state.inverse().col(i);
  return state.trace() -
         kappa * col.squaredNorm() / (1.0 + kappa * col(i));
}

InverseState first_leader_inverse(const Matrix& laplacian,
                                  const Matrix& laplacian_pinv, int i,
                                  double kappa) {
  const Eigen::Index n = laplacian_pinv.rows();
  if (i < 0 || i >= n) {
    throw std::invalid_argument("first_leader_inverse: index out of range");
  }
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("first_leader_inverse: gain must be positive");
  }
  const Vector pin = laplacian_pinv.col(i);
  const Vector ones = Vector::Ones(n);
  Matrix inv = laplacian_pinv;
  inv.noalias() -= pin * ones.transpose();
  inv.noalias() -= ones * pin.transpose();
  inv.array() += 1.0 / kappa + pin(i);
  Matrix defining = laplacian;
  defining(i, i) += kappa;
  InverseState state(std::move(defining), std::move(inv),
                     Provenance::kNoiseCorrupted, 0);
  state.finish_update();
  return state;
}

double first_leader_trace(const Matrix& laplacian_pinv, double pinv_trace,
                          int i, double kappa) {
  const double n = static_cast<double>(laplacian_pinv.rows());
  return pinv_trace + n * (1.0 / kappa + laplacian_pinv(i, i));
}

namespace {

Eigen::Matrix2d swap_capacitance(const Matrix& inv, int i, int j,
                                 double kappa_i, double kappa_j) {
  Eigen::Matrix2d k;
  k << 1.0 - kappa_i * inv(i, i), kappa_j * inv(i, j),
      -kappa_i * inv(j, i), 1.0 + kappa_j * inv(j, j);
  return k;
}

void check_swap_args(const InverseState& state, int i, int j, double kappa_i,
                     double kappa_j, const char* what) {
  check_index(state, i, what);
  check_index(state, j, what);
  if (i == j) {
    throw std::invalid_argument(std::string(what) +
                                ": leader and follower must differ");
  }
  if (!(kappa_i > 0.0) || !(kappa_j > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": gains must be positive");
  }
}

}  // namespace

InverseState rank2_swap_inverse(InverseState state, int i, int j,
                                double kappa_i, double kappa_j) {
  check_swap_args(state, i, j, kappa_i, kappa_j, "rank2_swap_inverse");
  const Matrix& inv = state.inverse_;
  const Eigen::Matrix2d kinv = invert_capacitance(
      swap_capacitance(inv, i, j, kappa_i, kappa_j), "rank2_swap_inverse");
  Eigen::Matrix<double, Eigen::Dynamic, 2> left(inv.rows(), 2);
  left.col(0) = -kappa_i * inv.col(i);
  left.col(1) = kappa_j * inv.col(j);
  Eigen::Matrix<double, Eigen::Dynamic, 2> right(inv.rows(), 2);
  right.col(0) = inv.col(i);
  right.col(1) = inv.col(j);
  const Eigen::Matrix<double, Eigen::Dynamic, 2> left_k = left * kinv;
  state.inverse_.noalias() -= left_k * right.transpose();
  state.defining_(i, i) -= kappa_i;
  state.defining_(j, j) += kappa_j;
  state.finish_update();
  return state;
}

double swap_objective_delta(const InverseState& state, int i, int j,
                            double kappa_i, double kappa_j) {
  check_swap_args(state, i, j, kappa_i, kappa_j, "swap_objective_delta");
  const Matrix& inv = state.inverse();
  const Eigen::Matrix2d kinv = invert_capacitance(
      swap_capacitance(inv, i, j, kappa_i, kappa_j), "swap_objective_delta");
  const auto ci = inv.col(i);
  const auto cj = inv.col(j);
  const double sq_ii = ci.squaredNorm();
  const double sq_ij = ci.dot(cj);
  const double sq_jj = cj.squaredNorm();
  Eigen::Matrix2d et_sq_ebar;
  et_sq_ebar << -kappa_i * sq_ii, kappa_j * sq_ij,
      -kappa_i * sq_ij, kappa_j * sq_jj;
  return state.trace() - (kinv * et_sq_ebar).trace();
}

namespace {

struct ReplacePieces {
  Vector m;  // M e_p
  Vector q;  // M xi
  Eigen::Matrix2d kinv;
};

ReplacePieces replace_pieces(const InverseState& state, int p,
                             const Vector& new_row, const char* what) {
  check_index(state, p, what);
  if (new_row.size() != state.size()) {
    throw std::invalid_argument(std::string(what) + ": row length mismatch");
  }
  Vector xi = new_row - state.defining().row(p).transpose();
  xi(p) *= 0.5;
  ReplacePieces out;
  out.m = state.inverse().col(p);
  out.q = times_sparse(state.inverse(), xi);
  Eigen::Matrix2d k;
  k << 1.0 + out.q(p), xi.dot(out.q), out.m(p), 1.0 + out.q(p);
  out.kinv = invert_capacitance(k, what);
  return out;
}

}  // namespace

InverseState replace_row_inverse(InverseState state, int p,
                                 const Vector& new_row) {
  const ReplacePieces pc = replace_pieces(state, p, new_row,
                                          "replace_row_inverse");
  Eigen::Matrix<double, Eigen::Dynamic, 2> left(state.size(), 2);
  left.col(0) = pc.m;
  left.col(1) = pc.q;
  Eigen::Matrix<double, Eigen::Dynamic, 2> right(state.size(), 2);
  right.col(0) = pc.q;
  right.col(1) = pc.m;
  const Eigen::Matrix<double, Eigen::Dynamic, 2> left_k = left * pc.kinv;
  state.inverse_.noalias() -= left_k * right.transpose();
  state.defining_.row(p) = new_row.transpose();
  state.defining_.col(p) = new_row;
  state.finish_update();
  return state;
}

double replace_row_trace(const InverseState& state, int p,
                         const Vector& new_row) {
  const ReplacePieces pc = replace_pieces(state, p, new_row,
                                          "replace_row_trace");
  Eigen::Matrix2d gram;
  gram << pc.q.dot(pc.m), pc.q.squaredNorm(), pc.m.squaredNorm(),
      pc.m.dot(pc.q);
  return state.trace() - (pc.kinv * gram).trace();
}

Vector consecutive_submatrix_row(const Matrix& full, int i) {
  const Eigen::Index m = full.rows();
  if (i < 0 || i + 1 >= m) {
    throw std::invalid_argument(
        "consecutive_submatrix: index must satisfy 0 <= i < n - 1");
  }
  Vector row(m - 1);
  for (Eigen::Index k = 0; k < m - 1; ++k) {
    row(k) = full(i, k <= i ? k : k + 1);
  }
  return row;
}

InverseState consecutive_submatrix_inverse(InverseState prev,
                                           const Matrix& full, int i) {
  if (prev.size() + 1 != full.rows()) {
    throw std::invalid_argument(
        "consecutive_submatrix_inverse: state size must be n - 1");
  }
  const Vector row = consecutive_submatrix_row(full, i);
  return replace_row_inverse(std::move(prev), i, row);
}

}  // namespace leadsel
