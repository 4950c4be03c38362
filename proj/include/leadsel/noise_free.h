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

// Leader selection when leaders hold their state exactly.
//
// Followers see only relative information, so the variance is
//
//   J_f = trace(L_f^{-1}),
//
// with L_f the Laplacian with leader rows and columns deleted. The lower
// bound comes from a semidefinite relaxation in (Y, y), Y standing in for
// (1 - x)(1 - x)^T, solved by ADMM. Greedy and swap give upper bounds.

#ifndef LEADSEL_NOISE_FREE_H_
#define LEADSEL_NOISE_FREE_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "leadsel/common.h"
#include "leadsel/graph.h"

namespace leadsel {

// trace(L_f^{-1}). Throws std::invalid_argument for an empty or full set.
double evaluate_Jf(const Laplacian& L, const std::vector<int>& leaders);

// The masked form trace((L o (1-x)(1-x)^T + diag(x))^{-1}) - 1^T x for a 0/1
// vector x with at least one leader.
double evaluate_Jf_masked(const Laplacian& L, const Vector& x);

// Nearest PSD matrix in Frobenius norm. The input is symmetrized first.
Matrix psd_project(const Matrix& m);

// h(Y, y) = trace(W^{-1}) + rho/2 ||Y - U||_F^2 + rho/2 ||y - u||^2 with
// W = L o Y + diag(1 - y), and its gradients
//   grad_Y h = -(W^{-2}) o L + rho (Y - U),
//   grad_y h = diag(W^{-2}) + rho (y - u).
// `value` is +infinity (and the gradients empty) when W is not PD.
struct RelaxedObjective {
  double value;
  Matrix grad_Y;
  Vector grad_y;
};

RelaxedObjective relaxed_objective(const Laplacian& L, const Matrix& Y,
                                   const Vector& y, const Matrix& U,
                                   const Vector& u, double rho,
                                   bool with_gradients = true);

struct AdmmOptions {
  double rho0 = 1.0;
  // Outer stopping threshold is eps_per_node * n on summed residual norms.
  double eps_per_node = 1e-4;
  double inner_eps = 1e-8;
  double yy_eps = 1e-5;
  int max_outer = 2000;
  int max_yy = 500;
  int max_inner = 100000;
  // Residual balancing: rho is scaled by balance_factor whenever one residual
  // exceeds balance_ratio times the other.
  double balance_ratio = 10.0;
  double balance_factor = 2.0;
};

void validate(const AdmmOptions& options);

struct AdmmState {
  Matrix Y;
  Vector y;
  Matrix Z;
  Vector z;
  Matrix Lambda;
  Vector lambda;
  double rho = 1.0;
};

struct YyStepResult {
  int iterations = 0;
  // False when max_yy was hit or the line search stalled; Y and y then hold
  // the last accepted iterate.
  bool converged = false;
};

// Gradient projection on the (Y, y) block with U = Z - Lambda/rho,
// u = z - lambda/rho: Ybar = psd(Y - grad_Y h), y moves along -grad_y h, and
// both share one Armijo step. Stops at the KKT point of Y >= 0.
YyStepResult yy_step(const Laplacian& L, AdmmState& state,
                     const AdmmOptions& options = {});

// Euclidean projection onto {z : 1^T z = level, 0 <= z <= 1} by the inner
// ADMM that alternates an analytic hyperplane step and a box clamp. A final
// shift of the unclamped entries puts the result exactly on the hyperplane.
struct ProjectionResult {
  Vector point;
  int iterations = 0;
  bool converged = false;
};

ProjectionResult project_box_hyperplane(const Vector& v, double level,
                                        double rho = 1.0, double eps = 1e-8,
                                        int max_iterations = 100000);

// Onto C1 = {z in [0,1]^n : 1^T z = num_followers}.
Vector simplex_project_vector(const Vector& v, int num_followers,
                              double eps = 1e-8);

// Onto C2 = {Y : Y_ij in [0,1], 1^T Y 1 = num_followers^2}, with the result
// symmetrized.
Matrix simplex_project_matrix(const Matrix& V, int num_followers,
                              double eps = 1e-8);

struct RelaxationSolutionNF {
  Matrix Y;
  Vector y;
  Matrix Z;
  Vector z;
  // Weak-duality certificate computed from the final (Y, y, Lambda); never
  // exceeds the relaxation optimum, hence the Boolean optimum.
  double lower_bound;
  // Relaxation objective trace(W^{-1}) - N_l evaluated at (Z, z) and at
  // (psd(Z), z). NaN when the masked matrix is not PD there.
  double primal_value_zz;
  double primal_value_psd_z;
  // (primal, dual) residual norms per outer iteration.
  std::vector<std::pair<double, double>> residual_history;
  double rho_final;
  int iterations;
  int yy_iterations;
  bool converged;
  // Human-readable warnings (yy_step stalls, non-PD evaluation points).
  std::vector<std::string> flags;
  // Eigenvalues of Y in descending order.
  Vector y_eigenvalues;
};

RelaxationSolutionNF cr2_solve(const Laplacian& L, int num_leaders,
                               const AdmmOptions& options = {});

struct LeaderSetResult {
  // Greedy: pick order. Swap: slot order.
  std::vector<int> leaders;
  double objective;
  std::vector<double> trajectory;  // greedy only
  int swaps_used = 0;
  int sweeps = 0;
};

// One leader at a time. Each round inverts the first candidate submatrix
// directly and reaches the others with consecutive rank-2 updates, so a round
// costs O(n^3). Ties go to the lowest index.
LeaderSetResult greedy_select_nf(const Laplacian& L, int num_leaders,
                                 int threads = 1);

struct SwapOptionsNF {
  int max_sweeps = 0;   // 0: no bound
  int max_swaps = -1;   // negative: 10 * n
};

// First-improvement leader/follower exchange. A swap replaces the follower's
// row and column of L_f with the leader's, a rank-2 change.
LeaderSetResult swap_refine_nf(const Laplacian& L,
                               const std::vector<int>& leaders,
                               const SwapOptionsNF& options = {});

// Enumeration oracle; lexicographically smallest set wins ties.
LeaderSetResult exhaustive_search_nf(const Laplacian& L, int num_leaders,
                                     std::uint64_t budget = 1'000'000);

}  // namespace leadsel

#endif  // LEADSEL_NOISE_FREE_H_
