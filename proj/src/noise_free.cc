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

#include "leadsel/noise_free.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "leadsel/lowrank.h"
#include "parallel.h"

namespace leadsel {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;

bool improves(double candidate, double incumbent) {
  return candidate < incumbent - kTieTolerance * std::abs(incumbent);
}

void check_leader_count(int n, int num_leaders, const char* what) {
  if (num_leaders < 1 || num_leaders >= n) {
    throw std::invalid_argument(std::string(what) +
                                ": number of leaders must be in [1, n-1]");
  }
}

std::vector<int> checked_leaders(int n, std::vector<int> leaders,
                                 const char* what) {
  check_leader_count(n, static_cast<int>(leaders.size()), what);
  std::vector<char> seen(n, 0);
  for (int i : leaders) {
    if (i < 0 || i >= n || seen[i]) {
      throw std::invalid_argument(std::string(what) +
                                  ": leaders must be distinct node indices");
    }
    seen[i] = 1;
  }
  return leaders;
}

// W = L o Y + diag(1 - y).
Matrix masked_matrix(const Matrix& L, const Matrix& Y, const Vector& y) {
  Matrix w = L.cwiseProduct(Y);
  w.diagonal() += (Vector::Ones(y.size()) - y);
  return w;
}

// trace(W^{-1}) - num_leaders, NaN when W is not PD.
double relaxation_value(const Matrix& L, const Matrix& Y, const Vector& y,
                        int num_leaders) {
  Eigen::LLT<Matrix> llt(masked_matrix(L, Y, y));
  if (llt.info() != Eigen::Success) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const Eigen::Index n = y.size();
  return llt.solve(Matrix::Identity(n, n)).trace() - num_leaders;
}

double sum_of_smallest(std::vector<double> values, std::size_t count) {
  count = std::min(count, values.size());
  std::nth_element(values.begin(), values.begin() + count, values.end());
  double s = 0.0;
  for (std::size_t k = 0; k < count; ++k) s += values[k];
  return s;
}

// Lower bound on the relaxation optimum from weak duality. With
// W = W(Y, y) PD, P = W^{-2}, G = -P o L and S = psd(G + Lambda) (any PSD S
// is dual feasible), the concave conjugate inequality
// trace(W^{-1}) >= 2 trace(P^{1/2}) - <P, W> makes the Lagrangian separable:
// the terms linear in (Y, y) are minimized over C2 and C1 in closed form.
double dual_certificate(const Matrix& L, const Matrix& Y, const Vector& y,
                        const Matrix& Lambda, int num_leaders) {
  const Eigen::Index n = y.size();
  const int nf = static_cast<int>(n) - num_leaders;
  Eigen::LLT<Matrix> llt(masked_matrix(L, Y, y));
  if (llt.info() != Eigen::Success) return -kInf;
  const Matrix w_inv = llt.solve(Matrix::Identity(n, n));
  const Matrix p = w_inv * w_inv;
  const Matrix g = -p.cwiseProduct(L);
  const Matrix s = psd_project(g + Lambda);
  double bound = 2.0 * w_inv.trace() - p.trace() - num_leaders;

  const Vector pd = p.diagonal();
  std::vector<double> diag(pd.data(), pd.data() + n);
  bound += sum_of_smallest(std::move(diag), static_cast<std::size_t>(nf));

  const Matrix reduced = g - s;
  std::vector<double> entries(reduced.data(), reduced.data() + n * n);
  // Entries of a C2 point are in [0, 1] and sum to nf^2, so the minimum of a
  // linear function puts weight 1 on its nf^2 smallest coefficients.
  bound += sum_of_smallest(std::move(entries),
                           static_cast<std::size_t>(nf) * nf);
  return bound;
}

}  // namespace

double evaluate_Jf(const Laplacian& L, const std::vector<int>& leaders) {
  const int n = L.size();
  if (leaders.empty() || static_cast<int>(leaders.size()) >= n) {
    throw std::invalid_argument(
        "evaluate_Jf: leader set must be nonempty and leave a follower");
  }
  Eigen::LLT<Matrix> llt(principal_submatrix(L, leaders));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("evaluate_Jf: grounded Laplacian is not PD");
  }
  const Eigen::Index m = n - static_cast<Eigen::Index>(leaders.size());
  return llt.solve(Matrix::Identity(m, m)).trace();
}

double evaluate_Jf_masked(const Laplacian& L, const Vector& x) {
  const int n = L.size();
  if (x.size() != n) {
    throw std::invalid_argument("evaluate_Jf_masked: size mismatch");
  }
  if (!(x.sum() > 0.0)) {
    throw std::invalid_argument("evaluate_Jf_masked: x has no leader");
  }
  const Vector f = Vector::Ones(n) - x;
  Matrix m = L.matrix().cwiseProduct(f * f.transpose());
  m.diagonal() += x;
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("evaluate_Jf_masked: masked matrix is not PD");
  }
  return llt.solve(Matrix::Identity(n, n)).trace() - x.sum();
}

Matrix psd_project(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("psd_project: eigendecomposition failed");
  }
  const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  Matrix out = eig.eigenvectors() * clipped.asDiagonal() *
               eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

RelaxedObjective relaxed_objective(const Laplacian& L, const Matrix& Y,
                                   const Vector& y, const Matrix& U,
                                   const Vector& u, double rho,
                                   bool with_gradients) {
  const Eigen::Index n = L.size();
  if (Y.rows() != n || Y.cols() != n || y.size() != n || U.rows() != n ||
      U.cols() != n || u.size() != n) {
    throw std::invalid_argument("relaxed_objective: size mismatch");
  }
  RelaxedObjective out{kInf, {}, {}};
  Eigen::LLT<Matrix> llt(masked_matrix(L.matrix(), Y, y));
  if (llt.info() != Eigen::Success) return out;
  const Matrix w_inv = llt.solve(Matrix::Identity(n, n));
  if (!w_inv.allFinite() || !(w_inv.diagonal().minCoeff() > 0.0)) return out;
  out.value = w_inv.trace() + 0.5 * rho * (Y - U).squaredNorm() +
              0.5 * rho * (y - u).squaredNorm();
  if (with_gradients) {
    const Matrix w_inv2 = w_inv * w_inv;
    out.grad_Y = -w_inv2.cwiseProduct(L.matrix()) + rho * (Y - U);
    out.grad_y = w_inv2.diagonal() + rho * (y - u);
  }
  return out;
}

void validate(const AdmmOptions& o) {
  if (!(o.rho0 > 0.0)) throw std::invalid_argument("admm.rho0: must be > 0");
  if (!(o.eps_per_node > 0.0)) {
    throw std::invalid_argument("admm.eps_per_node: must be > 0");
  }
  if (!(o.inner_eps > 0.0)) {
    throw std::invalid_argument("admm.inner_eps: must be > 0");
  }
  if (!(o.yy_eps > 0.0)) throw std::invalid_argument("admm.yy_eps: must be > 0");
  if (o.max_outer < 1) throw std::invalid_argument("admm.max_outer: must be >= 1");
  if (o.max_yy < 1) throw std::invalid_argument("admm.max_yy: must be >= 1");
  if (o.max_inner < 1) throw std::invalid_argument("admm.max_inner: must be >= 1");
  if (!(o.balance_ratio > 1.0)) {
    throw std::invalid_argument("admm.balance_ratio: must be > 1");
  }
  if (!(o.balance_factor > 1.0)) {
    throw std::invalid_argument("admm.balance_factor: must be > 1");
  }
}

YyStepResult yy_step(const Laplacian& L, AdmmState& state,
                     const AdmmOptions& options) {
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  constexpr double kMinStep = 1e-20;
  const Matrix U = state.Z - state.Lambda / state.rho;
  const Vector u = state.z - state.lambda / state.rho;

  YyStepResult result;
  RelaxedObjective cur =
      relaxed_objective(L, state.Y, state.y, U, u, state.rho);
  if (!std::isfinite(cur.value)) {
    throw NumericalError("yy_step: starting point outside the domain of h");
  }
  const double eps = options.yy_eps;
  for (int r = 0; r < options.max_yy; ++r) {
    // Cheap conditions first; the eigenvalue test only runs when they hold.
    if (cur.grad_y.norm() <= eps &&
        state.Y.cwiseProduct(cur.grad_Y).sum() <= eps) {
      const Matrix sym_grad = 0.5 * (cur.grad_Y + cur.grad_Y.transpose());
      const double lambda_min =
          Eigen::SelfAdjointEigenSolver<Matrix>(sym_grad,
                                                Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
      if (lambda_min >= -eps) {
        result.converged = true;
        return result;
      }
    }
    const Matrix dY = psd_project(state.Y - cur.grad_Y) - state.Y;
    const Vector dy = -cur.grad_y;
    const double slope = cur.grad_Y.cwiseProduct(dY).sum() + cur.grad_y.dot(dy);
    double step = 1.0;
    RelaxedObjective trial;
    while (true) {
      trial = relaxed_objective(L, state.Y + step * dY, state.y + step * dy,
                                U, u, state.rho, /*with_gradients=*/false);
      if (trial.value <= cur.value + kArmijo * step * slope) break;
      step *= kShrink;
      if (step < kMinStep) {
        result.iterations = r;
        return result;
      }
    }
    state.Y += step * dY;
    state.Y = 0.5 * (state.Y + state.Y.transpose());
    state.y += step * dy;
    cur = relaxed_objective(L, state.Y, state.y, U, u, state.rho);
    result.iterations = r + 1;
  }
  return result;
}

ProjectionResult project_box_hyperplane(const Vector& v, double level,
                                        double rho, double eps,
                                        int max_iterations) {
  const Eigen::Index n = v.size();
  if (n == 0) throw std::invalid_argument("projection: empty vector");
  if (!(level >= 0.0) || level > static_cast<double>(n)) {
    throw std::invalid_argument("projection: level must be in [0, n]");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("projection: rho must be > 0");

  ProjectionResult out;
  Vector w = v.cwiseMax(0.0).cwiseMin(1.0);
  Vector lam = Vector::Zero(n);
  Vector a(n), z(n), w_next(n);
  for (int s = 0; s < max_iterations; ++s) {
    a = rho * w - lam + v;
    const double eta = (a.sum() - (rho + 1.0) * level) / static_cast<double>(n);
    z = (a.array() - eta) / (rho + 1.0);
    w_next = (z + lam / rho).cwiseMax(0.0).cwiseMin(1.0);
    lam += rho * (z - w_next);
    const bool done = (z - w_next).norm() <= eps && (w_next - w).norm() <= eps;
    w.swap(w_next);
    out.iterations = s + 1;
    if (done) {
      out.converged = true;
      break;
    }
  }

  // The box clamp leaves a residual on the hyperplane of order eps. Spread
  // it over the coordinates that can still move, repeating as they saturate.
  for (int pass = 0; pass < 64; ++pass) {
    const double deficit = level - w.sum();
    if (std::abs(deficit) <= 1e-14 * std::max(1.0, level)) break;
    int movable = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (deficit > 0.0 ? w(k) < 1.0 : w(k) > 0.0) ++movable;
    }
    if (movable == 0) break;
    const double shift = deficit / movable;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (deficit > 0.0 ? w(k) < 1.0 : w(k) > 0.0) {
        w(k) = std::clamp(w(k) + shift, 0.0, 1.0);
      }
    }
  }
  out.point = std::move(w);
  return out;
}

Vector simplex_project_vector(const Vector& v, int num_followers, double eps) {
  if (num_followers < 0 || num_followers > v.size()) {
    throw std::invalid_argument(
        "simplex_project_vector: level must be in [0, n]");
  }
  return project_box_hyperplane(v, num_followers, 1.0, eps).point;
}

Matrix simplex_project_matrix(const Matrix& V, int num_followers, double eps) {
  if (V.rows() != V.cols()) {
    throw std::invalid_argument("simplex_project_matrix: matrix not square");
  }
  if (num_followers < 0 || num_followers > V.rows()) {
    throw std::invalid_argument(
        "simplex_project_matrix: level must be in [0, n]");
  }
  const Eigen::Index n = V.rows();
  const Vector flat = Eigen::Map<const Vector>(V.data(), n * n);
  const Vector proj =
      project_box_hyperplane(flat, static_cast<double>(num_followers) *
                                       num_followers,
                             1.0, eps)
          .point;
  const Matrix m = Eigen::Map<const Matrix>(proj.data(), n, n);
  return 0.5 * (m + m.transpose());
}

RelaxationSolutionNF cr2_solve(const Laplacian& L, int num_leaders,
                               const AdmmOptions& options) {
  const int n = L.size();
  check_leader_count(n, num_leaders, "cr2_solve");
  validate(options);
  const int nf = n - num_leaders;
  const double nn = static_cast<double>(n);
  const double level_y = nf;
  const double level_Y = static_cast<double>(nf) * nf;

  AdmmState st;
  st.Y = Matrix::Constant(n, n, level_Y / (nn * nn));
  st.y = Vector::Constant(n, level_y / nn);
  st.Z = st.Y;
  st.z = st.y;
  st.Lambda = Matrix::Zero(n, n);
  st.lambda = Vector::Zero(n);
  st.rho = options.rho0;

  RelaxationSolutionNF out;
  out.iterations = 0;
  out.yy_iterations = 0;
  out.converged = false;
  const double eps = options.eps_per_node * nn;
  int stalled_yy = 0;

  for (int k = 0; k < options.max_outer; ++k) {
    const YyStepResult yy = yy_step(L, st, options);
    out.yy_iterations += yy.iterations;
    if (!yy.converged) ++stalled_yy;

    const Matrix z_prev = st.Z;
    const Vector zv_prev = st.z;
    st.z = project_box_hyperplane(st.y + st.lambda / st.rho, level_y, 1.0,
                                  options.inner_eps, options.max_inner)
               .point;
    const Matrix target = st.Y + st.Lambda / st.rho;
    const Vector proj =
        project_box_hyperplane(Eigen::Map<const Vector>(target.data(),
                                                        Eigen::Index{n} * n),
                               level_Y, 1.0, options.inner_eps,
                               options.max_inner)
            .point;
    const Matrix zm = Eigen::Map<const Matrix>(proj.data(), n, n);
    st.Z = 0.5 * (zm + zm.transpose());

    st.Lambda += st.rho * (st.Y - st.Z);
    st.lambda += st.rho * (st.y - st.z);

    const double primal = (st.Y - st.Z).norm() + (st.y - st.z).norm();
    const double change = (st.Z - z_prev).norm() + (st.z - zv_prev).norm();
    const double dual = st.rho * change;
    out.residual_history.emplace_back(primal, dual);
    out.iterations = k + 1;
    if (primal <= eps && change <= eps) {
      out.converged = true;
      break;
    }
    // Lambda and lambda are stored unscaled, so a new rho needs no rescaling.
    if (primal > options.balance_ratio * dual) {
      st.rho *= options.balance_factor;
    } else if (dual > options.balance_ratio * primal) {
      st.rho /= options.balance_factor;
    }
  }

  if (!out.converged) out.flags.push_back("max outer iterations reached");
  if (stalled_yy > 0) {
    out.flags.push_back("yy_step did not reach its KKT tolerance in " +
                        std::to_string(stalled_yy) + " outer iterations");
  }
  out.lower_bound =
      dual_certificate(L.matrix(), st.Y, st.y, st.Lambda, num_leaders);
  out.primal_value_zz = relaxation_value(L.matrix(), st.Z, st.z, num_leaders);
  out.primal_value_psd_z =
      relaxation_value(L.matrix(), psd_project(st.Z), st.z, num_leaders);
  if (std::isnan(out.primal_value_zz)) {
    out.flags.push_back("masked matrix at (Z, z) is not PD");
  }
  if (std::isnan(out.primal_value_psd_z)) {
    out.flags.push_back("masked matrix at (psd(Z), z) is not PD");
  }
  Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(st.Y, Eigen::EigenvaluesOnly)
                  .eigenvalues();
  out.y_eigenvalues = ev.reverse();
  out.rho_final = st.rho;
  out.Y = std::move(st.Y);
  out.y = std::move(st.y);
  out.Z = std::move(st.Z);
  out.z = std::move(st.z);
  return out;
}

namespace {

// Traces of inv([A]_c) for every local index c in [begin, end), where A is a
// positive semidefinite matrix whose proper principal submatrices are PD.
void submatrix_traces(const Matrix& a, int begin, int end,
                      std::vector<double>& out) {
  Matrix first(a.rows() - 1, a.cols() - 1);
  const Eigen::Index m = a.rows();
  for (Eigen::Index r = 0, rr = 0; r < m; ++r) {
    if (r == begin) continue;
    for (Eigen::Index c = 0, cc = 0; c < m; ++c) {
      if (c == begin) continue;
      first(rr, cc++) = a(r, c);
    }
    ++rr;
  }
  InverseState state(std::move(first), Provenance::kNoiseFree);
  out[begin] = state.trace();
  for (int c = begin + 1; c < end; ++c) {
    state = consecutive_submatrix_inverse(std::move(state), a, c - 1);
    out[c] = state.trace();
  }
}

}  // namespace

LeaderSetResult greedy_select_nf(const Laplacian& L, int num_leaders,
                                 int threads) {
  const int n = L.size();
  check_leader_count(n, num_leaders, "greedy_select_nf");
  LeaderSetResult result;
  std::vector<int> followers(n);
  std::iota(followers.begin(), followers.end(), 0);

  while (static_cast<int>(result.leaders.size()) < num_leaders) {
    const Matrix a = restrict_to(L.matrix(), followers);
    const int m = static_cast<int>(followers.size());
    std::vector<double> values(m);
    // Each chunk pays one direct inverse, then sweeps with rank-2 updates.
    const int chunks = std::clamp(threads, 1, m);
    internal::parallel_for(0, chunks, chunks, [&](int t) {
      const int begin = static_cast<int>(static_cast<long>(m) * t / chunks);
      const int end = static_cast<int>(static_cast<long>(m) * (t + 1) / chunks);
      if (begin < end) submatrix_traces(a, begin, end, values);
    });
    int best = 0;
    for (int c = 1; c < m; ++c) {
      if (improves(values[c], values[best])) best = c;
    }
    result.leaders.push_back(followers[best]);
    result.trajectory.push_back(values[best]);
    followers.erase(followers.begin() + best);
  }
  result.objective = result.trajectory.back();
  return result;
}

LeaderSetResult swap_refine_nf(const Laplacian& L,
                               const std::vector<int>& leaders_in,
                               const SwapOptionsNF& options) {
  const int n = L.size();
  std::vector<int> leaders = checked_leaders(n, leaders_in, "swap_refine_nf");
  const Matrix& full = L.matrix();
  const int cap = options.max_swaps < 0 ? 10 * n : options.max_swaps;

  // Followers sit at fixed slots of L_f; a swap overwrites one slot.
  std::vector<int> followers = complement(n, leaders);
  const int m = static_cast<int>(followers.size());
  std::vector<int> slot_of(n, -1);
  for (int p = 0; p < m; ++p) slot_of[followers[p]] = p;

  InverseState state(restrict_to(full, followers), Provenance::kNoiseFree);
  double objective = state.trace();
  LeaderSetResult result;
  Vector row(m);
  auto fill_row = [&](int leader, int p) {
    for (int k = 0; k < m; ++k) row(k) = full(leader, followers[k]);
    row(p) = full(leader, leader);
  };

  while (result.swaps_used < cap &&
         (options.max_sweeps <= 0 || result.sweeps < options.max_sweeps)) {
    ++result.sweeps;
    bool accepted = false;
    for (std::size_t s = 0; s < leaders.size() && !accepted; ++s) {
      const int i = leaders[s];
      for (int j = 0; j < n && !accepted; ++j) {
        const int p = slot_of[j];
        if (p < 0) continue;
        fill_row(i, p);
        const double value = replace_row_trace(state, p, row);
        if (!improves(value, objective)) continue;
        state = replace_row_inverse(std::move(state), p, row);
        objective = state.trace();
        followers[p] = i;
        slot_of[i] = p;
        slot_of[j] = -1;
        leaders[s] = j;
        ++result.swaps_used;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  result.leaders = std::move(leaders);
  result.objective = objective;
  return result;
}

LeaderSetResult exhaustive_search_nf(const Laplacian& L, int num_leaders,
                                     std::uint64_t budget) {
  const int n = L.size();
  check_leader_count(n, num_leaders, "exhaustive_search_nf");
  if (binomial_capped(n, num_leaders, budget) > budget) {
    throw BudgetExceededError("exhaustive_search_nf: C(n, k) exceeds budget");
  }
  std::vector<int> comb(num_leaders);
  std::iota(comb.begin(), comb.end(), 0);
  LeaderSetResult result;
  result.objective = kInf;
  while (true) {
    const double value = evaluate_Jf(L, comb);
    if (result.leaders.empty() || improves(value, result.objective)) {
      result.objective = value;
      result.leaders = comb;
    }
    int k = num_leaders - 1;
    while (k >= 0 && comb[k] == n - num_leaders + k) --k;
    if (k < 0) break;
    ++comb[k];
    for (int r = k + 1; r < num_leaders; ++r) comb[r] = comb[r - 1] + 1;
  }
  return result;
}

}  // namespace leadsel
