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

#include <gtest/gtest.h>

#include "leadsel/graph.h"
#include "test_support.h"

namespace leadsel {
namespace {

using ::leadsel::testing::direct_inverse;
using ::leadsel::testing::path_graph;
using ::leadsel::testing::random_connected_graph;
using ::leadsel::testing::random_spd;
using ::leadsel::testing::relative_frobenius;
using ::leadsel::testing::uniform_int;

Matrix with_gain(const Matrix& L, const std::vector<std::pair<int, double>>& g) {
  Matrix m = L;
  for (auto [i, k] : g) m(i, i) += k;
  return m;
}

double asymmetry(const Matrix& m) {
  return (m - m.transpose()).norm() / m.norm();
}

TEST(InverseStateTest, RejectsIndefinite) {
  const Matrix L = laplacian(path_graph(3)).matrix();
  EXPECT_THROW(InverseState(L, Provenance::kNoiseCorrupted), NumericalError);
}

TEST(Rank1Test, ThreePathAddsLeader) {
  const Matrix L = laplacian(path_graph(3)).matrix();
  InverseState s(with_gain(L, {{1, 1.0}}), Provenance::kNoiseCorrupted);
  const double before = s.trace();
  const double predicted = rank1_add_trace(s, 0, 1.0);
  s = rank1_add_inverse(std::move(s), 0, 1.0);
  const Matrix direct = direct_inverse(with_gain(L, {{1, 1.0}, {0, 1.0}}));
  EXPECT_LT(relative_frobenius(s.inverse(), direct), 1e-10);
  EXPECT_NEAR(predicted, direct.trace(), 1e-12);
  EXPECT_LT(s.trace(), before);
}

TEST(Rank1Test, RandomSpdMatrices) {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    const int n = uniform_int(rng, 2, 15);
    const Matrix a = random_spd(n, rng);
    const int i = uniform_int(rng, 0, n - 1);
    const double k = rng.uniform(0.1, 10.0);
    const InverseState s =
        rank1_add_inverse(InverseState(a, Provenance::kNoiseCorrupted), i, k);
    EXPECT_LT(relative_frobenius(s.inverse(), direct_inverse(with_gain(a, {{i, k}}))),
              1e-10);
  }
}

TEST(Rank1Test, TraceStrictlyDecreases) {
  Rng rng(32);
  for (int t = 0; t < 50; ++t) {
    const int n = uniform_int(rng, 3, 20);
    const Matrix L = laplacian(random_connected_graph(n, 0.2, rng)).matrix();
    InverseState s(with_gain(L, {{0, 1.0}}), Provenance::kNoiseCorrupted);
    for (double k : {1e-3, 1.0, 1e3}) {
      EXPECT_LT(rank1_add_trace(s, uniform_int(rng, 0, n - 1), k), s.trace());
    }
  }
}

TEST(Rank1Test, RejectsBadArguments) {
  InverseState s(Matrix::Identity(2, 2), Provenance::kNoiseCorrupted);
  EXPECT_THROW(rank1_add_inverse(s, 2, 1.0), std::invalid_argument);
  EXPECT_THROW(rank1_add_inverse(s, 0, 0.0), std::invalid_argument);
}

TEST(FirstLeaderTest, HandExamples) {
  const Laplacian L2 = laplacian(path_graph(2));
  const Matrix p2 = pseudo_inverse(L2);
  EXPECT_NEAR(first_leader_trace(p2, p2.trace(), 0, 1.0), 3.0, 1e-14);
  const InverseState s2 = first_leader_inverse(L2.matrix(), p2, 0, 1.0);
  Matrix expected(2, 2);
  expected << 1, 1, 1, 2;
  EXPECT_LT((s2.inverse() - expected).norm(), 1e-14);

  const Laplacian L3 = laplacian(path_graph(3));
  const Matrix p3 = pseudo_inverse(L3);
  EXPECT_NEAR(first_leader_trace(p3, p3.trace(), 1, 1.0), 5.0, 1e-13);
  const InverseState s3 = first_leader_inverse(L3.matrix(), p3, 1, 1.0);
  EXPECT_NEAR(s3.trace(), 5.0, 1e-13);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(s3.inverse()).eigenvalues()(0),
            0.0);
}

TEST(Rank2SwapTest, ThreePathSwap) {
  const Matrix L = laplacian(path_graph(3)).matrix();
  const InverseState s(with_gain(L, {{0, 1.0}}), Provenance::kNoiseCorrupted);
  EXPECT_NEAR(s.trace(), 6.0, 1e-12);
  EXPECT_NEAR(swap_objective_delta(s, 0, 1, 1.0, 1.0), 5.0, 1e-12);
  const InverseState t = rank2_swap_inverse(s, 0, 1, 1.0, 1.0);
  EXPECT_NEAR(t.trace(), 5.0, 1e-12);
}

TEST(Rank2SwapTest, IdentitySwapRejected) {
  const InverseState s(Matrix::Identity(3, 3), Provenance::kNoiseCorrupted);
  EXPECT_THROW(rank2_swap_inverse(s, 1, 1, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(swap_objective_delta(s, 1, 1, 1.0, 1.0), std::invalid_argument);
}

TEST(Rank2SwapTest, SingularResultIsReported) {
  // Taking the whole diagonal of node 0 away leaves a zero row.
  const InverseState s(Matrix::Identity(2, 2), Provenance::kNoiseCorrupted);
  EXPECT_THROW(rank2_swap_inverse(s, 0, 1, 1.0, 1.0), NumericalError);
  EXPECT_THROW(swap_objective_delta(s, 0, 1, 1.0, 1.0), NumericalError);
}

TEST(Rank2SwapTest, RandomSwapsMatchDirect) {
  Rng rng(33);
  for (int t = 0; t < 10; ++t) {
    const int n = uniform_int(rng, 3, 15);
    const Matrix a = random_spd(n, rng);
    const int i = uniform_int(rng, 0, n - 1);
    int j = uniform_int(rng, 0, n - 2);
    if (j >= i) ++j;
    const double ki = rng.uniform(0.1, 0.5);  // keeps a - ki e_i e_i^T PD
    const double kj = rng.uniform(0.1, 5.0);
    const InverseState s(a, Provenance::kNoiseCorrupted);
    const InverseState u = rank2_swap_inverse(s, i, j, ki, kj);
    const Matrix direct = direct_inverse(with_gain(a, {{i, -ki}, {j, kj}}));
    EXPECT_LT(relative_frobenius(u.inverse(), direct), 1e-9);
    EXPECT_NEAR(swap_objective_delta(s, i, j, ki, kj), direct.trace(),
                1e-9 * direct.trace());
  }
}

TEST(Rank2SwapTest, SwapBackRestoresObjective) {
  Rng rng(34);
  for (int t = 0; t < 30; ++t) {
    const int n = uniform_int(rng, 3, 20);
    const Matrix L = laplacian(random_connected_graph(n, 0.2, rng)).matrix();
    const int i = uniform_int(rng, 0, n - 1);
    int j = uniform_int(rng, 0, n - 2);
    if (j >= i) ++j;
    const InverseState s(with_gain(L, {{i, 2.0}}), Provenance::kNoiseCorrupted);
    const InverseState once = rank2_swap_inverse(s, i, j, 2.0, 2.0);
    EXPECT_NEAR(swap_objective_delta(once, j, i, 2.0, 2.0), s.trace(),
                1e-9 * s.trace());
    const InverseState twice = rank2_swap_inverse(once, j, i, 2.0, 2.0);
    EXPECT_NEAR(twice.trace(), s.trace(), 1e-9 * s.trace());
  }
}

TEST(ConsecutiveSubmatrixTest, ThreePath) {
  const Laplacian L = laplacian(path_graph(3));
  InverseState s(principal_submatrix(L, {0}), Provenance::kNoiseFree);
  s = consecutive_submatrix_inverse(std::move(s), L.matrix(), 0);
  EXPECT_LT((s.inverse() - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(ConsecutiveSubmatrixTest, TwoPath) {
  const Laplacian L = laplacian(path_graph(2));
  InverseState s(principal_submatrix(L, {0}), Provenance::kNoiseFree);
  s = consecutive_submatrix_inverse(std::move(s), L.matrix(), 0);
  EXPECT_NEAR(s.inverse()(0, 0), 1.0, 1e-15);
}

TEST(ConsecutiveSubmatrixTest, LatticeSweep) {
  const Laplacian L = laplacian(build_lattice(4, 4));
  InverseState s(principal_submatrix(L, {0}), Provenance::kNoiseFree);
  for (int i = 0; i + 1 < 16; ++i) {
    s = consecutive_submatrix_inverse(std::move(s), L.matrix(), i);
    const Matrix direct = direct_inverse(principal_submatrix(L, {i + 1}));
    EXPECT_LT(relative_frobenius(s.inverse(), direct), 1e-9) << "i=" << i;
    EXPECT_EQ(s.defining(), principal_submatrix(L, {i + 1}));
  }
}

TEST(ConsecutiveSubmatrixTest, RowConvention) {
  Matrix m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  // Row of [M]_1 at local index 0 holds node 0 against nodes {0, 2}.
  EXPECT_EQ(consecutive_submatrix_row(m, 0), Vector::Map(std::vector<double>{1, 3}.data(), 2));
  EXPECT_THROW(consecutive_submatrix_row(m, 2), std::invalid_argument);
}

TEST(ReplaceRowTest, MatchesDirect) {
  Rng rng(35);
  for (int t = 0; t < 20; ++t) {
    const int n = uniform_int(rng, 2, 12);
    const Matrix a = random_spd(n, rng) + 5.0 * Matrix::Identity(n, n);
    const int p = uniform_int(rng, 0, n - 1);
    Vector row = a.row(p).transpose();
    for (int k = 0; k < n; ++k) row(k) += rng.uniform(-0.5, 0.5);
    Matrix b = a;
    b.row(p) = row.transpose();
    b.col(p) = row;
    const InverseState s(a, Provenance::kNoiseFree);
    const Matrix direct = direct_inverse(b);
    EXPECT_NEAR(replace_row_trace(s, p, row), direct.trace(),
                1e-10 * std::abs(direct.trace()));
    const InverseState u = replace_row_inverse(s, p, row);
    EXPECT_LT(relative_frobenius(u.inverse(), direct), 1e-9);
  }
}

// Property sweep: every kernel against the direct inverse of its defining
// matrix, on random connected graphs with n in [3, 20].
TEST(KernelPropertyTest, AllKernelsOnRandomGraphs) {
  Rng rng(36);
  for (int t = 0; t < 120; ++t) {
    const int n = uniform_int(rng, 3, 20);
    const Laplacian lap(random_connected_graph(n, 0.25, rng));
    const Matrix& L = lap.matrix();
    const Matrix pinv = pseudo_inverse(lap);
    const int i = uniform_int(rng, 0, n - 1);
    int j = uniform_int(rng, 0, n - 2);
    if (j >= i) ++j;
    const double ki = rng.uniform(0.2, 5.0);
    const double kj = rng.uniform(0.2, 5.0);

    const InverseState first = first_leader_inverse(L, pinv, i, ki);
    EXPECT_LT(relative_frobenius(first.inverse(),
                                 direct_inverse(with_gain(L, {{i, ki}}))),
              1e-9);
    EXPECT_LT(asymmetry(first.inverse()), 1e-10);

    const InverseState added = rank1_add_inverse(first, j, kj);
    EXPECT_LT(relative_frobenius(added.inverse(),
                                 direct_inverse(with_gain(L, {{i, ki}, {j, kj}}))),
              1e-9);

    int k = uniform_int(rng, 0, n - 2);
    if (k >= i) ++k;
    const double kk = rng.uniform(0.2, 5.0);
    if (k != j) {
      const InverseState swapped = rank2_swap_inverse(added, j, k, kj, kk);
      EXPECT_LT(relative_frobenius(
                    swapped.inverse(),
                    direct_inverse(with_gain(L, {{i, ki}, {k, kk}}))),
                1e-9);
      EXPECT_LT(asymmetry(swapped.inverse()), 1e-10);
    }

    const int c = uniform_int(rng, 0, n - 2);
    const InverseState sub(principal_submatrix(lap, {c}), Provenance::kNoiseFree);
    const InverseState next = consecutive_submatrix_inverse(sub, L, c);
    EXPECT_LT(relative_frobenius(next.inverse(),
                                 direct_inverse(principal_submatrix(lap, {c + 1}))),
              1e-9);
  }
}

TEST(RefreshTest, RefreshEveryFiftyUpdates) {
  const Matrix L = laplacian(build_lattice(3, 3)).matrix();
  InverseState s(with_gain(L, {{0, 1.0}}), Provenance::kNoiseCorrupted);
  EXPECT_EQ(s.updates_since_refresh(), 0);
  int leader = 0;
  for (int u = 1; u <= 120; ++u) {
    const int next = (leader + 1) % 9;
    s = rank2_swap_inverse(std::move(s), leader, next, 1.0, 1.0);
    leader = next;
    EXPECT_EQ(s.updates_since_refresh(), u % kRefreshInterval);
  }
  EXPECT_LT(relative_frobenius(s.inverse(), direct_inverse(s.defining())),
            1e-12);
}

}  // namespace
}  // namespace leadsel
