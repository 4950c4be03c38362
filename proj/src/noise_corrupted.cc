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

#include "leadsel/noise_corrupted.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "leadsel/lowrank.h"
#include "parallel.h"

namespace leadsel {
namespace {

// Relative margin under which two objective values count as a tie.
constexpr double kTieTolerance = 1e-12;

void check_leader_count(int n, int num_leaders, const char* what) {
  if (num_leaders < 1 || num_leaders >= n) {
    throw std::invalid_argument(std::string(what) +
                                ": number of leaders must be in [1, n-1]");
  }
}

void check_gains(int n, const Vector& kappa, const char* what) {
  if (kappa.size() != n) {
    throw std::invalid_argument(std::string(what) +
                                ": gain vector has wrong length");
  }
  if (!(kappa.minCoeff() > 0.0) || !kappa.allFinite()) {
    throw std::invalid_argument(std::string(what) +
                                ": gains must be positive and finite");
  }
}

Matrix gained_laplacian(const Laplacian& L, const Vector& kappa,
                        const Vector& x) {
  Matrix m = L.matrix();
  m.diagonal() += kappa.cwiseProduct(x);
  return m;
}

double trace_of_inverse(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("matrix is not positive definite");
  }
  return llt.solve(Matrix::Identity(m.rows(), m.cols())).trace();
}

bool improves(double candidate, double incumbent) {
  return candidate < incumbent - kTieTolerance * std::abs(incumbent);
}

}  // namespace

LeaderSelection::LeaderSelection(int n, std::vector<int> leaders, Vector kappa)
    : leaders_(std::move(leaders)), kappa_(std::move(kappa)) {
  check_gains(n, kappa_, "LeaderSelection");
  check_leader_count(n, num_leaders(), "LeaderSelection");
  std::vector<char> seen(n, 0);
  for (int i : leaders_) {
    if (i < 0 || i >= n) {
      throw std::invalid_argument("LeaderSelection: leader out of range");
    }
    if (seen[i]) {
      throw std::invalid_argument("LeaderSelection: duplicate leader");
    }
    seen[i] = 1;
  }
}

std::vector<int> LeaderSelection::sorted_leaders() const {
  std::vector<int> out = leaders_;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> LeaderSelection::followers() const {
  return complement(num_nodes(), leaders_);
}

bool LeaderSelection::is_leader(int i) const {
  return std::find(leaders_.begin(), leaders_.end(), i) != leaders_.end();
}

Vector LeaderSelection::indicator() const {
  Vector x = Vector::Zero(num_nodes());
  for (int i : leaders_) x(i) = 1.0;
  return x;
}

double evaluate_J(const Laplacian& L, const LeaderSelection& sel) {
  if (sel.num_nodes() != L.size()) {
    throw std::invalid_argument("evaluate_J: size mismatch");
  }
  return evaluate_J(L, sel.kappa(), sel.indicator());
}

double evaluate_J(const Laplacian& L, const Vector& kappa, const Vector& x) {
  if (x.size() != L.size() || kappa.size() != L.size()) {
    throw std::invalid_argument("evaluate_J: size mismatch");
  }
  return trace_of_inverse(gained_laplacian(L, kappa, x));
}

double evaluate_J_schur(const Laplacian& L, const LeaderSelection& sel) {
  const std::vector<int> lead = sel.sorted_leaders();
  const std::vector<int> follow = sel.followers();
  const Matrix& full = L.matrix();
  const int nl = static_cast<int>(lead.size());
  const int nf = static_cast<int>(follow.size());

  Matrix l0(nl, nf);
  for (int c = 0; c < nf; ++c) {
    for (int r = 0; r < nl; ++r) l0(r, c) = full(lead[r], follow[c]);
  }
  Eigen::LLT<Matrix> lf(restrict_to(full, follow));
  if (lf.info() != Eigen::Success) {
    throw NumericalError("evaluate_J_schur: follower block is singular");
  }
  const Matrix lf_inv = lf.solve(Matrix::Identity(nf, nf));
  const Matrix coupling = lf_inv * l0.transpose();  // Lf^{-1} L0^T
  Matrix schur = restrict_to(full, lead) - l0 * coupling;
  for (int r = 0; r < nl; ++r) schur(r, r) += sel.kappa()(lead[r]);
  Eigen::LLT<Matrix> s(schur);
  if (s.info() != Eigen::Success) {
    throw NumericalError("evaluate_J_schur: Schur complement is singular");
  }
  const Matrix s_inv = s.solve(Matrix::Identity(nl, nl));
  return lf_inv.trace() + (coupling * s_inv * coupling.transpose()).trace() +
         s_inv.trace();
}

GreedyResult greedy_select(const Laplacian& L, const Vector& kappa,
                           int num_leaders, int threads) {
  const int n = L.size();
  check_leader_count(n, num_leaders, "greedy_select");
  check_gains(n, kappa, "greedy_select");

  const Matrix pinv = pseudo_inverse(L);
  const double pinv_trace = pinv.trace();
  std::vector<double> values(n);
  internal::parallel_for(0, n, threads, [&](int i) {
    values[i] = first_leader_trace(pinv, pinv_trace, i, kappa(i));
  });
  int first = 0;
  for (int i = 1; i < n; ++i) {
    if (improves(values[i], values[first])) first = i;
  }

  std::vector<int> leaders{first};
  std::vector<char> is_leader(n, 0);
  is_leader[first] = 1;
  InverseState state = first_leader_inverse(L.matrix(), pinv, first,
                                            kappa(first));
  std::vector<double> trajectory{state.trace()};

  while (static_cast<int>(leaders.size()) < num_leaders) {
    internal::parallel_for(0, n, threads, [&](int i) {
      values[i] = is_leader[i] ? std::numeric_limits<double>::infinity()
                               : rank1_add_trace(state, i, kappa(i));
    });
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (is_leader[i]) continue;
      if (best < 0 || improves(values[i], values[best])) best = i;
    }
    state = rank1_add_inverse(std::move(state), best, kappa(best));
    leaders.push_back(best);
    is_leader[best] = 1;
    trajectory.push_back(state.trace());
  }
  const double objective = trajectory.back();
  return GreedyResult{LeaderSelection(n, std::move(leaders), kappa), objective,
                      std::move(trajectory)};
}

SwapResult swap_refine(const Laplacian& L, const LeaderSelection& sel,
                       const SwapOptions& options) {
  const int n = L.size();
  if (sel.num_nodes() != n) {
    throw std::invalid_argument("swap_refine: size mismatch");
  }
  const Vector& kappa = sel.kappa();
  const int cap = options.max_swaps < 0 ? 10 * n : options.max_swaps;
  std::vector<int> leaders = sel.leaders();
  std::vector<char> is_leader(n, 0);
  for (int i : leaders) is_leader[i] = 1;

  InverseState state(gained_laplacian(L, kappa, sel.indicator()),
                     Provenance::kNoiseCorrupted);
  double objective = state.trace();
  int swaps = 0;
  int sweeps = 0;
  std::vector<double> values(n);

  while (swaps < cap &&
         (options.max_sweeps <= 0 || sweeps < options.max_sweeps)) {
    ++sweeps;
    bool accepted = false;
    for (std::size_t slot = 0; slot < leaders.size() && !accepted; ++slot) {
      const int i = leaders[slot];
      int chosen = -1;
      if (options.threads > 1) {
        internal::parallel_for(0, n, options.threads, [&](int j) {
          values[j] = is_leader[j] ? std::numeric_limits<double>::infinity()
                                   : swap_objective_delta(state, i, j,
                                                          kappa(i), kappa(j));
        });
        for (int j = 0; j < n && chosen < 0; ++j) {
          if (!is_leader[j] && improves(values[j], objective)) chosen = j;
        }
      } else {
        for (int j = 0; j < n && chosen < 0; ++j) {
          if (is_leader[j]) continue;
          const double v = swap_objective_delta(state, i, j, kappa(i),
                                                kappa(j));
          if (improves(v, objective)) chosen = j;
        }
      }
      if (chosen >= 0) {
        state = rank2_swap_inverse(std::move(state), i, chosen, kappa(i),
                                   kappa(chosen));
        objective = state.trace();
        is_leader[i] = 0;
        is_leader[chosen] = 1;
        leaders[slot] = chosen;
        ++swaps;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  return SwapResult{LeaderSelection(n, std::move(leaders), kappa), objective,
                    swaps, sweeps};
}

LeaderSelection degree_heuristic(const Laplacian& L, int num_leaders,
                                 const Vector& kappa) {
  const int n = L.size();
  check_leader_count(n, num_leaders, "degree_heuristic");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return L.degree(a) > L.degree(b);
  });
  order.resize(num_leaders);
  return LeaderSelection(n, std::move(order), kappa);
}

ExhaustiveResult exhaustive_search(const Laplacian& L, const Vector& kappa,
                                   int num_leaders, std::uint64_t budget) {
  const int n = L.size();
  check_leader_count(n, num_leaders, "exhaustive_search");
  check_gains(n, kappa, "exhaustive_search");
  if (binomial_capped(n, num_leaders, budget) > budget) {
    throw BudgetExceededError("exhaustive_search: C(n, k) exceeds budget");
  }
  std::vector<int> comb(num_leaders);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<int> best_set;
  double best = std::numeric_limits<double>::infinity();
  Vector x(n);
  while (true) {
    x.setZero();
    for (int i : comb) x(i) = 1.0;
    const double value = evaluate_J(L, kappa, x);
    if (best_set.empty() || improves(value, best)) {
      best = value;
      best_set = comb;
    }
    int k = num_leaders - 1;
    while (k >= 0 && comb[k] == n - num_leaders + k) --k;
    if (k < 0) break;
    ++comb[k];
    for (int r = k + 1; r < num_leaders; ++r) comb[r] = comb[r - 1] + 1;
  }
  return ExhaustiveResult{LeaderSelection(n, std::move(best_set), kappa), best};
}

void validate(const IpmOptions& o) {
  if (!(o.tau0 > 0.0)) throw std::invalid_argument("ipm.tau0: must be > 0");
  if (!(o.tau_growth > 1.0)) {
    throw std::invalid_argument("ipm.tau_growth: must be > 1");
  }
  if (!(o.gap_tol > 0.0)) throw std::invalid_argument("ipm.gap_tol: must be > 0");
  if (!(o.newton_tol > 0.0)) {
    throw std::invalid_argument("ipm.newton_tol: must be > 0");
  }
  if (o.max_newton < 1) throw std::invalid_argument("ipm.max_newton: must be >= 1");
  if (!(o.armijo > 0.0 && o.armijo < 0.5)) {
    throw std::invalid_argument("ipm.armijo: must be in (0, 0.5)");
  }
  if (!(o.backtrack > 0.0 && o.backtrack < 1.0)) {
    throw std::invalid_argument("ipm.backtrack: must be in (0, 1)");
  }
  if (!(o.boundary_fraction > 0.0 && o.boundary_fraction < 1.0)) {
    throw std::invalid_argument("ipm.boundary_fraction: must be in (0, 1)");
  }
}

double barrier_value(const Laplacian& L, const Vector& kappa, const Vector& x,
                     double tau) {
  if (!(x.minCoeff() > 0.0) || !(x.maxCoeff() < 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  Eigen::LLT<Matrix> llt(gained_laplacian(L, kappa, x));
  if (llt.info() != Eigen::Success) {
    return std::numeric_limits<double>::infinity();
  }
  const double j = llt.solve(Matrix::Identity(x.size(), x.size())).trace();
  return tau * j - (x.array().log() + (1.0 - x.array()).log()).sum();
}

BarrierDerivatives barrier_derivatives(const Laplacian& L, const Vector& kappa,
                                       const Vector& x, double tau) {
  const Eigen::Index n = x.size();
  if (!(x.minCoeff() > 0.0) || !(x.maxCoeff() < 1.0)) {
    throw std::invalid_argument("barrier_derivatives: x must be interior");
  }
  Eigen::LLT<Matrix> llt(gained_laplacian(L, kappa, x));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("barrier_derivatives: L + D_kappa D_x not PD");
  }
  const Matrix g = llt.solve(Matrix::Identity(n, n));
  const Matrix g2 = g * g;
  const Eigen::ArrayXd xa = x.array();

  BarrierDerivatives out;
  out.value = tau * g.trace() - (xa.log() + (1.0 - xa).log()).sum();
  out.gradient = (-tau * kappa.array() * g2.diagonal().array() - 1.0 / xa +
                  1.0 / (1.0 - xa))
                     .matrix();
  out.hessian = 2.0 * tau *
                (kappa.asDiagonal() * g2 * kappa.asDiagonal())
                    .cwiseProduct(g);
  out.hessian.diagonal().array() +=
      1.0 / xa.square() + 1.0 / (1.0 - xa).square();
  return out;
}

Vector equality_newton_direction(const Matrix& hessian, const Vector& gradient) {
  const Eigen::Index n = gradient.size();
  Eigen::LLT<Matrix> llt(hessian);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("equality_newton_direction: Hessian not PD");
  }
  const Vector h_inv_g = llt.solve(gradient);
  const Vector h_inv_1 = llt.solve(Vector::Ones(n));
  const double delta = -h_inv_g.sum() / h_inv_1.sum();
  return -h_inv_g - delta * h_inv_1;
}

RelaxationSolutionNC cr1_lower_bound(const Laplacian& L, const Vector& kappa,
                                     int num_leaders,
                                     const IpmOptions& options) {
  const int n = L.size();
  check_leader_count(n, num_leaders, "cr1_lower_bound");
  check_gains(n, kappa, "cr1_lower_bound");
  validate(options);

  Vector x = Vector::Constant(n, static_cast<double>(num_leaders) / n);
  double tau = options.tau0;
  int newton_iters = 0;
  double decrement = 0.0;
  bool all_centered = true;

  while (true) {
    bool centered = false;
    for (int it = 0; it < options.max_newton; ++it) {
      const BarrierDerivatives d = barrier_derivatives(L, kappa, x, tau);
      const Vector dx = equality_newton_direction(d.hessian, d.gradient);
      const double slope = d.gradient.dot(dx);
      decrement = -slope;
      if (decrement < -1e-12 * (1.0 + std::abs(d.value))) {
        throw NumericalError("cr1_lower_bound: Newton direction is not a "
                             "descent direction");
      }
      // Below ~100 ulps of q the decrement is rounding noise, so the
      // tolerance cannot usefully be tighter than that.
      const double floor = 100.0 * std::numeric_limits<double>::epsilon() *
                           std::abs(d.value);
      if (decrement / 2.0 <= std::max(options.newton_tol, floor)) {
        centered = true;
        break;
      }
      double step = 1.0;
      for (int i = 0; i < n; ++i) {
        if (dx(i) < 0.0) {
          step = std::min(step, -options.boundary_fraction * x(i) / dx(i));
        } else if (dx(i) > 0.0) {
          step = std::min(step,
                          options.boundary_fraction * (1.0 - x(i)) / dx(i));
        }
      }
      Vector trial = x + step * dx;
      double value = barrier_value(L, kappa, trial, tau);
      while (value > d.value + options.armijo * step * slope) {
        step *= options.backtrack;
        if (step < 1e-14) break;
        trial = x + step * dx;
        value = barrier_value(L, kappa, trial, tau);
      }
      ++newton_iters;
      if (step < 1e-14) {
        // Rounding floor of q: the decrement can no longer be resolved.
        centered = decrement / 2.0 <= 1e3 * std::max(options.newton_tol, floor);
        break;
      }
      x = trial;
    }
    all_centered = all_centered && centered;
    if (2.0 * n / tau < options.gap_tol * n) break;
    tau *= options.tau_growth;
  }

  RelaxationSolutionNC out;
  out.x = x;
  out.lower_bound = evaluate_J(L, kappa, x);
  out.duality_gap_estimate = 2.0 * n / tau;
  out.certified_lower_bound = out.lower_bound - out.duality_gap_estimate;
  out.barrier_tau_final = tau;
  out.newton_iters = newton_iters;
  out.final_decrement = decrement;
  out.converged = all_centered;
  return out;
}

MonteCarloEstimate monte_carlo_variance(const Laplacian& L,
                                        const LeaderSelection& sel,
                                        const MonteCarloOptions& options) {
  const int n = L.size();
  if (sel.num_nodes() != n) {
    throw std::invalid_argument("monte_carlo_variance: size mismatch");
  }
  if (!(options.dt > 0.0) || !(options.horizon > options.dt) ||
      options.paths < 1 || !(options.burn_in >= 0.0 && options.burn_in < 1.0)) {
    throw std::invalid_argument("monte_carlo_variance: invalid options");
  }
  const Matrix a = gained_laplacian(L, sel.kappa(), sel.indicator());
  const double lambda_max =
      Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .maxCoeff();
  if (!(options.dt * lambda_max < 0.5)) {
    throw std::invalid_argument(
        "monte_carlo_variance: step-size guard dt * lambda_max < 0.5 violated");
  }
  const Matrix step = Matrix::Identity(n, n) - options.dt * a;
  const double noise_scale = std::sqrt(options.dt);
  const auto steps = static_cast<std::int64_t>(
      std::llround(options.horizon / options.dt));
  const auto burn = static_cast<std::int64_t>(options.burn_in * steps);

  Rng rng(options.seed);
  double accumulated = 0.0;
  std::int64_t samples = 0;
  Vector psi(n), next(n);
  for (int path = 0; path < options.paths; ++path) {
    psi.setZero();
    for (std::int64_t k = 0; k < steps; ++k) {
      next.noalias() = step * psi;
      for (int i = 0; i < n; ++i) next(i) += noise_scale * rng.normal();
      psi.swap(next);
      if (k >= burn) {
        accumulated += psi.squaredNorm();
        ++samples;
      }
    }
  }
  return MonteCarloEstimate{accumulated / static_cast<double>(samples),
                            samples};
}

}  // namespace leadsel
