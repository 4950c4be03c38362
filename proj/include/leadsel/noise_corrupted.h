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

// Leader selection when leaders are themselves subject to noise.
//
// With leader indicator x and feedback gains kappa the steady-state variance
// of the network is J(x) / 2 with
//
//   J(x) = trace((L + D_kappa D_x)^{-1}).
//
// This header provides the exact objective (two independent formulas), the
// relaxed lower bound (x in [0,1]^n, solved by a log-barrier Newton method),
// greedy and swap upper bounds, a degree baseline, an enumeration oracle and a
// stochastic simulation of the underlying dynamics.

#ifndef LEADSEL_NOISE_CORRUPTED_H_
#define LEADSEL_NOISE_CORRUPTED_H_

#include <cstdint>
#include <vector>

#include "leadsel/common.h"
#include "leadsel/graph.h"

namespace leadsel {

// Boolean leader indicator with per-node gains. Leaders are kept in the
// order they were supplied (greedy pick order, or slot order after swaps).
class LeaderSelection {
 public:
  // Requires 1 <= leaders.size() < n, distinct in-range indices, and
  // kappa.size() == n with every entry positive.
  LeaderSelection(int n, std::vector<int> leaders, Vector kappa);

  int num_nodes() const { return static_cast<int>(kappa_.size()); }
  int num_leaders() const { return static_cast<int>(leaders_.size()); }
  const std::vector<int>& leaders() const { return leaders_; }
  const Vector& kappa() const { return kappa_; }

  std::vector<int> sorted_leaders() const;
  std::vector<int> followers() const;
  bool is_leader(int i) const;
  // x as a 0/1 vector.
  Vector indicator() const;

 private:
  std::vector<int> leaders_;
  Vector kappa_;
};

inline Vector uniform_gains(int n, double value = 1.0) {
  return Vector::Constant(n, value);
}

// J = trace((L + D_kappa D_x)^{-1}) via a Cholesky factorization. Throws
// NumericalError when the matrix is singular (no leader).
double evaluate_J(const Laplacian& L, const LeaderSelection& sel);

// Same objective for a fractional x in [0,1]^n.
double evaluate_J(const Laplacian& L, const Vector& kappa, const Vector& x);

// Leader/follower block form:
//   J = trace(Lf^{-1} + Lf^{-1} L0^T S^{-1} L0 Lf^{-1} + S^{-1}),
//   S = L_l + D_kappa_l - L0 Lf^{-1} L0^T.
double evaluate_J_schur(const Laplacian& L, const LeaderSelection& sel);

struct GreedyResult {
  LeaderSelection selection;
  double objective;
  // Objective after each pick; strictly decreasing.
  std::vector<double> trajectory;
};

// One leader at a time. The first pick uses the pseudo-inverse closed form,
// every later one the O(n) rank-1 trace formula. Ties go to the lowest index.
GreedyResult greedy_select(const Laplacian& L, const Vector& kappa,
                           int num_leaders, int threads = 1);

struct SwapOptions {
  // Upper bound on full (leader, follower) scans; 0 means no bound.
  int max_sweeps = 0;
  // Cap on accepted swaps; negative means 10 * n.
  int max_swaps = -1;
  // Threads for evaluating the candidates of one leader slot.
  int threads = 1;
};

struct SwapResult {
  LeaderSelection selection;
  double objective;
  int swaps_used;
  int sweeps;
};

// First-improvement leader/follower exchange. Scans (leader slot, follower)
// pairs row-major, accepts the first swap that lowers J by more than a
// relative 1e-12, and restarts the scan. Stops at a local optimum or a cap.
SwapResult swap_refine(const Laplacian& L, const LeaderSelection& sel,
                       const SwapOptions& options = {});

// The num_leaders highest-degree nodes, ties to the lowest index.
LeaderSelection degree_heuristic(const Laplacian& L, int num_leaders,
                                 const Vector& kappa);

struct ExhaustiveResult {
  LeaderSelection selection;
  double objective;
};

// Global optimum by enumerating all C(n, num_leaders) sets (first one found
// wins ties, i.e. the lexicographically smallest). Throws
// BudgetExceededError beyond `budget` subsets.
ExhaustiveResult exhaustive_search(const Laplacian& L, const Vector& kappa,
                                   int num_leaders,
                                   std::uint64_t budget = 1'000'000);

struct IpmOptions {
  double tau0 = 1.0;
  double tau_growth = 10.0;
  // Outer loop stops once 2n / tau < gap_tol * n.
  double gap_tol = 1e-6;
  // Centering stops once the Newton decrement lambda^2 / 2 < newton_tol.
  double newton_tol = 1e-9;
  int max_newton = 200;
  double armijo = 0.01;
  double backtrack = 0.5;
  // Largest fraction of the distance to the box boundary a step may cover.
  double boundary_fraction = 0.99;
};

void validate(const IpmOptions& options);

struct RelaxationSolutionNC {
  Vector x;
  // J(x) at the final barrier iterate.
  double lower_bound;
  // lower_bound - 2n / tau: certified up to the centering accuracy.
  double certified_lower_bound;
  double barrier_tau_final;
  int newton_iters;
  double duality_gap_estimate;
  double final_decrement;
  bool converged;
};

// Barrier objective
//   q(x) = tau * J(x) - sum_i (log x_i + log(1 - x_i))
// and its derivatives
//   (grad q)_i = -tau kappa_i (G^2)_ii - 1/x_i + 1/(1 - x_i),
//   hess q     = 2 tau (D_kappa G^2 D_kappa) o G + diag(1/x^2 + 1/(1-x)^2),
// with G = (L + D_kappa D_x)^{-1}.
struct BarrierDerivatives {
  double value;
  Vector gradient;
  Matrix hessian;
};

// +infinity outside the open box.
double barrier_value(const Laplacian& L, const Vector& kappa, const Vector& x,
                     double tau);
BarrierDerivatives barrier_derivatives(const Laplacian& L, const Vector& kappa,
                                       const Vector& x, double tau);

// Newton step for minimizing q subject to 1^T x = const:
//   dx = -H^{-1} g - delta H^{-1} 1,  delta = -(1^T H^{-1} g) / (1^T H^{-1} 1).
Vector equality_newton_direction(const Matrix& hessian, const Vector& gradient);

// Relaxation with x in [0,1]^n, 1^T x = num_leaders. Starts from
// (num_leaders / n) 1 and follows the central path.
RelaxationSolutionNC cr1_lower_bound(const Laplacian& L, const Vector& kappa,
                                     int num_leaders,
                                     const IpmOptions& options = {});

struct MonteCarloOptions {
  double horizon = 1000.0;
  double dt = 0.01;
  int paths = 10;
  std::uint64_t seed = 1;
  // Leading fraction of each path discarded before averaging.
  double burn_in = 0.2;
};

struct MonteCarloEstimate {
  // Time-and-path average of ||psi||^2; expectation J / 2.
  double total_variance;
  std::int64_t samples;
};

// Euler-Maruyama simulation of d(psi) = -(L + D_kappa D_x) psi dt + dw.
// Requires dt * lambda_max < 0.5.
MonteCarloEstimate monte_carlo_variance(const Laplacian& L,
                                        const LeaderSelection& sel,
                                        const MonteCarloOptions& options);

}  // namespace leadsel

#endif  // LEADSEL_NOISE_CORRUPTED_H_
