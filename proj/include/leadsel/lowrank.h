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

// Matrix-inversion-lemma updates of a tracked inverse.
//
// Every kernel costs O(n^2) (some O(n) when only the new trace is needed) and
// returns a fresh InverseState. States carry their defining matrix alongside
// the inverse so that floating-point drift can be cleared by a direct
// refactorization: after kRefreshInterval updates, or as soon as a cheap
// sanity check on the updated inverse fails, the inverse is recomputed from
// the defining matrix with a Cholesky factorization.

#ifndef LEADSEL_LOWRANK_H_
#define LEADSEL_LOWRANK_H_

#include "leadsel/common.h"

namespace leadsel {

enum class Provenance {
  kNoiseCorrupted,  // tracks (L + D_kappa D_x)^{-1}
  kNoiseFree,       // tracks the inverse of a grounded Laplacian
};

inline constexpr int kRefreshInterval = 50;

class InverseState {
 public:
  // Factors `defining` directly. Throws NumericalError if it is not PD.
  InverseState(Matrix defining, Provenance provenance);

  const Matrix& inverse() const { return inverse_; }
  const Matrix& defining() const { return defining_; }
  Provenance provenance() const { return provenance_; }
  int size() const { return static_cast<int>(inverse_.rows()); }
  double trace() const { return inverse_.trace(); }
  int updates_since_refresh() const { return updates_since_refresh_; }

 private:
  InverseState(Matrix defining, Matrix inverse, Provenance provenance,
               int updates);

  // Symmetrizes, counts the update and refreshes when due.
  void finish_update();
  void refresh();

  Matrix defining_;
  Matrix inverse_;
  Provenance provenance_;
  int updates_since_refresh_ = 0;

  friend InverseState first_leader_inverse(const Matrix&, const Matrix&, int,
                                           double);
  friend InverseState rank1_add_inverse(InverseState, int, double);
  friend InverseState rank2_swap_inverse(InverseState, int, int, double,
                                         double);
  friend InverseState replace_row_inverse(InverseState, int, const Vector&);
};

// (M + kappa e_i e_i^T)^{-1} from M^{-1}.
InverseState rank1_add_inverse(InverseState state, int i, double kappa);

// trace((M + kappa e_i e_i^T)^{-1}) in O(n):
// trace(M^{-1}) - kappa ||M^{-1} e_i||^2 / (1 + kappa (M^{-1})_ii).
double rank1_add_trace(const InverseState& state, int i, double kappa);

// (L + kappa e_i e_i^T)^{-1} from the Laplacian pseudo-inverse via the
// generalized rank-1 update
//   L^+ - (L^+ e_i) 1^T - 1 (L^+ e_i)^T + (1/kappa + (L^+)_ii) 11^T.
// `laplacian` is only used to seed the defining matrix for later refreshes.
InverseState first_leader_inverse(const Matrix& laplacian,
                                  const Matrix& laplacian_pinv, int i,
                                  double kappa);

// trace(L^+) + n (1/kappa + (L^+)_ii), given trace(L^+).
double first_leader_trace(const Matrix& laplacian_pinv, double pinv_trace,
                          int i, double kappa);

// Moves gain kappa_i off node i and puts gain kappa_j on node j:
// (M - kappa_i e_i e_i^T + kappa_j e_j e_j^T)^{-1}, a rank-2 Woodbury step
// with E = [e_i e_j] and Ebar = [-kappa_i e_i, kappa_j e_j]. Throws
// std::invalid_argument for i == j and NumericalError when the 2x2 capacitance
// matrix I + E^T M^{-1} Ebar is singular (the swap would leave no leader).
InverseState rank2_swap_inverse(InverseState state, int i, int j,
                                double kappa_i, double kappa_j);

// Trace after the same swap, evaluated without forming the new inverse:
//   J - trace((I + E^T M^{-1} Ebar)^{-1} E^T M^{-2} Ebar),
// where the needed entries of M^{-2} are inner products of rows of M^{-1}.
double swap_objective_delta(const InverseState& state, int i, int j,
                            double kappa_i, double kappa_j);

// Replaces row and column p of the defining matrix by `new_row` (new_row(p)
// is the new diagonal entry). The change is e_p xi^T + xi e_p^T with
// xi = new_row - old_row and xi_p halved, i.e. rank 2.
InverseState replace_row_inverse(InverseState state, int p,
                                 const Vector& new_row);

// Trace of the inverse after replace_row_inverse, without forming it.
double replace_row_trace(const InverseState& state, int p,
                         const Vector& new_row);

// Given the inverse of [M]_i (M with row/column i deleted), returns the
// inverse of [M]_{i+1}. In local coordinates the two submatrices differ only
// in row/column i, which holds node i+1 in [M]_i and node i in [M]_{i+1}.
InverseState consecutive_submatrix_inverse(InverseState prev,
                                           const Matrix& full, int i);

// The row of [M]_{i+1} at local index i, in local coordinates.
Vector consecutive_submatrix_row(const Matrix& full, int i);

}  // namespace leadsel

#endif  // LEADSEL_LOWRANK_H_
