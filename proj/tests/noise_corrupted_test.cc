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

#include <gtest/gtest.h>

#include "test_support.h"

namespace leadsel {
namespace {

using ::leadsel::testing::cycle_graph;
using ::leadsel::testing::fd_gradient;
using ::leadsel::testing::path_graph;
using ::leadsel::testing::random_connected_graph;
using ::leadsel::testing::random_gains;
using ::leadsel::testing::random_subset;
using ::leadsel::testing::star_graph;
using ::leadsel::testing::uniform_int;

LeaderSelection unit_selection(int n, std::vector<int> leaders) {
  return LeaderSelection(n, std::move(leaders), uniform_gains(n));
}

TEST(LeaderSelectionTest, Validates) {
  EXPECT_THROW(unit_selection(3, {}), std::invalid_argument);
  EXPECT_THROW(unit_selection(3, {0, 1, 2}), std::invalid_argument);
  EXPECT_THROW(unit_selection(3, {0, 0}), std::invalid_argument);
  EXPECT_THROW(unit_selection(3, {3}), std::invalid_argument);
  EXPECT_THROW(LeaderSelection(2, {0}, Vector::Zero(2)), std::invalid_argument);
  const LeaderSelection s = unit_selection(4, {2, 0});
  EXPECT_EQ(s.sorted_leaders(), (std::vector<int>{0, 2}));
  EXPECT_EQ(s.followers(), (std::vector<int>{1, 3}));
  EXPECT_EQ(s.indicator(), (Vector(4) << 1, 0, 1, 0).finished());
}

TEST(EvaluateJTest, HandExamples) {
  EXPECT_NEAR(evaluate_J(laplacian(path_graph(2)), unit_selection(2, {0})),
              3.0, 1e-13);
  EXPECT_NEAR(evaluate_J(laplacian(path_graph(3)), unit_selection(3, {1})),
              5.0, 1e-13);
}

TEST(EvaluateJTest, NoLeaderIsSingular) {
  EXPECT_THROW(evaluate_J(laplacian(path_graph(3)), uniform_gains(3),
                          Vector::Zero(3)),
               NumericalError);
}

TEST(EvaluateJTest, AllLeadersLargeGainsGoToZero) {
  const Laplacian L = laplacian(build_lattice(3, 3));
  double prev = std::numeric_limits<double>::infinity();
  for (double k : {1.0, 10.0, 1e2, 1e4, 1e6}) {
    const double j = evaluate_J(L, uniform_gains(9, k), Vector::Ones(9));
    EXPECT_LT(j, prev);
    prev = j;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(EvaluateJSchurTest, HandExamples) {
  EXPECT_NEAR(evaluate_J_schur(laplacian(path_graph(3)), unit_selection(3, {1})),
              5.0, 1e-13);
  EXPECT_NEAR(evaluate_J_schur(laplacian(path_graph(2)), unit_selection(2, {0})),
              3.0, 1e-13);
}

TEST(EvaluateJSchurTest, MatchesDirectFormula) {
  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    const int n = uniform_int(rng, 3, 20);
    const Laplacian L(random_connected_graph(n, 0.2, rng));
    const LeaderSelection sel(
        n, random_subset(n, uniform_int(rng, 1, n - 1), rng),
        random_gains(n, rng));
    const double a = evaluate_J(L, sel);
    EXPECT_NEAR(evaluate_J_schur(L, sel), a, 1e-9 * a);
  }
}

TEST(GreedyTest, ThreePath) {
  const GreedyResult r =
      greedy_select(laplacian(path_graph(3)), uniform_gains(3), 1);
  EXPECT_EQ(r.selection.leaders(), (std::vector<int>{1}));
  EXPECT_NEAR(r.objective, 5.0, 1e-12);
}

TEST(GreedyTest, TieGoesToLowestIndex) {
  const GreedyResult r =
      greedy_select(laplacian(cycle_graph(6)), uniform_gains(6), 1);
  EXPECT_EQ(r.selection.leaders(), (std::vector<int>{0}));
}

TEST(GreedyTest, TrajectoryStrictlyDecreasesAndMatchesDirect) {
  Rng rng(42);
  for (int t = 0; t < 30; ++t) {
    const int n = uniform_int(rng, 4, 25);
    const Laplacian L(random_connected_graph(n, 0.15, rng));
    const Vector k = random_gains(n, rng);
    const GreedyResult r = greedy_select(L, k, n - 1);
    for (std::size_t s = 1; s < r.trajectory.size(); ++s) {
      EXPECT_LT(r.trajectory[s], r.trajectory[s - 1]);
    }
    EXPECT_NEAR(r.objective, evaluate_J(L, r.selection), 1e-9 * r.objective);
  }
}

TEST(GreedyTest, ThreadedScanIsIdentical) {
  Rng rng(43);
  const Laplacian L(random_connected_graph(40, 0.1, rng));
  const Vector k = random_gains(40, rng);
  const GreedyResult a = greedy_select(L, k, 6, 1);
  const GreedyResult b = greedy_select(L, k, 6, 4);
  EXPECT_EQ(a.selection.leaders(), b.selection.leaders());
  EXPECT_EQ(a.trajectory, b.trajectory);
}

TEST(GreedyTest, RejectsBadLeaderCount) {
  const Laplacian L = laplacian(path_graph(3));
  EXPECT_THROW(greedy_select(L, uniform_gains(3), 0), std::invalid_argument);
  EXPECT_THROW(greedy_select(L, uniform_gains(3), 3), std::invalid_argument);
}

TEST(SwapTest, ThreePathImproves) {
  const SwapResult r =
      swap_refine(laplacian(path_graph(3)), unit_selection(3, {0}));
  EXPECT_EQ(r.selection.leaders(), (std::vector<int>{1}));
  EXPECT_NEAR(r.objective, 5.0, 1e-12);
  EXPECT_EQ(r.swaps_used, 1);
}

TEST(SwapTest, LocalOptimumIsFixedPoint) {
  const SwapResult r =
      swap_refine(laplacian(path_graph(3)), unit_selection(3, {1}));
  EXPECT_EQ(r.swaps_used, 0);
  EXPECT_NEAR(r.objective, 5.0, 1e-12);
}

TEST(SwapTest, NeverWorseAndCapped) {
  Rng rng(44);
  for (int t = 0; t < 30; ++t) {
    const int n = uniform_int(rng, 4, 20);
    const Laplacian L(random_connected_graph(n, 0.2, rng));
    const LeaderSelection start(n, random_subset(n, uniform_int(rng, 1, n - 1), rng),
                                random_gains(n, rng));
    const double before = evaluate_J(L, start);
    const SwapResult r = swap_refine(L, start);
    EXPECT_LE(r.objective, before);
    EXPECT_LE(r.swaps_used, 10 * n);
    EXPECT_NEAR(r.objective, evaluate_J(L, r.selection), 1e-9 * r.objective);
    SwapOptions one;
    one.max_swaps = 1;
    EXPECT_LE(swap_refine(L, start, one).swaps_used, 1);
  }
}

TEST(DegreeHeuristicTest, Examples) {
  EXPECT_EQ(degree_heuristic(laplacian(path_graph(3)), 1, uniform_gains(3))
                .leaders(),
            (std::vector<int>{1}));
  EXPECT_EQ(degree_heuristic(laplacian(star_graph(6)), 1, uniform_gains(6))
                .leaders(),
            (std::vector<int>{0}));
  EXPECT_EQ(degree_heuristic(laplacian(build_lattice(3, 3)), 1,
                             uniform_gains(9))
                .leaders(),
            (std::vector<int>{4}));
  // Ties among the four degree-3 edge midpoints go to the lowest index.
  EXPECT_EQ(degree_heuristic(laplacian(build_lattice(3, 3)), 3,
                             uniform_gains(9))
                .leaders(),
            (std::vector<int>{4, 1, 3}));
}

TEST(ExhaustiveTest, Examples) {
  const ExhaustiveResult p3 =
      exhaustive_search(laplacian(path_graph(3)), uniform_gains(3), 1);
  EXPECT_EQ(p3.selection.leaders(), (std::vector<int>{1}));
  EXPECT_NEAR(p3.objective, 5.0, 1e-12);
  const ExhaustiveResult p2 =
      exhaustive_search(laplacian(path_graph(2)), uniform_gains(2), 1);
  EXPECT_EQ(p2.selection.leaders(), (std::vector<int>{0}));
  EXPECT_NEAR(p2.objective, 3.0, 1e-12);
}

TEST(ExhaustiveTest, CycleIsVertexTransitive) {
  const Laplacian L = laplacian(cycle_graph(4));
  const double j0 = evaluate_J(L, unit_selection(4, {0}));
  for (int i = 1; i < 4; ++i) {
    EXPECT_NEAR(evaluate_J(L, unit_selection(4, {i})), j0, 1e-12);
  }
  EXPECT_EQ(exhaustive_search(L, uniform_gains(4), 1).selection.leaders(),
            (std::vector<int>{0}));
}

TEST(ExhaustiveTest, BudgetGuard) {
  const Laplacian L = laplacian(build_lattice(5, 6));
  EXPECT_THROW(exhaustive_search(L, uniform_gains(30), 15, 1000),
               BudgetExceededError);
}

TEST(BarrierTest, GradientAndHessianMatchFiniteDifferences) {
  Rng rng(45);
  for (int t = 0; t < 5; ++t) {
    const int n = uniform_int(rng, 3, 10);
    const Laplacian L(random_connected_graph(n, 0.3, rng));
    const Vector k = random_gains(n, rng);
    const double tau = rng.uniform(0.5, 20.0);
    for (int p = 0; p < 5; ++p) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x(i) = rng.uniform(0.05, 0.95);
      const BarrierDerivatives d = barrier_derivatives(L, k, x, tau);
      EXPECT_NEAR(d.value, barrier_value(L, k, x, tau), 1e-12 * std::abs(d.value));
      const Vector g = fd_gradient(
          [&](const Vector& z) { return barrier_value(L, k, z, tau); }, x, 1e-5);
      EXPECT_LT((g - d.gradient).norm(), 1e-6 * d.gradient.norm());
      Matrix h(n, n);
      for (int i = 0; i < n; ++i) {
        h.col(i) = fd_gradient(
            [&](const Vector& z) {
              return barrier_derivatives(L, k, z, tau).gradient(i);
            },
            x, 1e-5);
      }
      EXPECT_LT((h - d.hessian).norm(), 1e-6 * d.hessian.norm());
    }
  }
}

TEST(BarrierTest, ValueIsInfiniteOutsideBox) {
  const Laplacian L = laplacian(path_graph(3));
  const Vector k = uniform_gains(3);
  EXPECT_TRUE(std::isinf(barrier_value(L, k, Vector::Constant(3, 1.0), 1.0)));
  EXPECT_TRUE(std::isinf(barrier_value(L, k, Vector::Constant(3, 0.0), 1.0)));
  EXPECT_THROW(barrier_derivatives(L, k, Vector::Constant(3, 1.5), 1.0),
               std::invalid_argument);
}

TEST(BarrierTest, NewtonDirectionStaysOnHyperplane) {
  Rng rng(46);
  for (int t = 0; t < 20; ++t) {
    const int n = uniform_int(rng, 3, 15);
    const Laplacian L(random_connected_graph(n, 0.3, rng));
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.uniform(0.05, 0.95);
    const BarrierDerivatives d =
        barrier_derivatives(L, random_gains(n, rng), x, 3.0);
    const Vector dx = equality_newton_direction(d.hessian, d.gradient);
    EXPECT_LT(std::abs(dx.sum()), 1e-9 * std::max(1.0, dx.norm()));
    EXPECT_LT(d.gradient.dot(dx), 0.0);
  }
}

TEST(Cr1Test, TwoPathIsSymmetric) {
  const RelaxationSolutionNC s =
      cr1_lower_bound(laplacian(path_graph(2)), uniform_gains(2), 1);
  EXPECT_NEAR(s.x(0), 0.5, 1e-8);
  EXPECT_NEAR(s.x(1), 0.5, 1e-8);
  EXPECT_NEAR(s.lower_bound, 2.4, 1e-8);
  EXPECT_TRUE(s.converged);
  EXPECT_LE(s.certified_lower_bound, s.lower_bound);
}

TEST(Cr1Test, ThreePathBoundAndFeasibility) {
  const RelaxationSolutionNC s =
      cr1_lower_bound(laplacian(path_graph(3)), uniform_gains(3), 1);
  EXPECT_LE(s.lower_bound, 5.0);
  EXPECT_NEAR(s.x.sum(), 1.0, 1e-8);
  EXPECT_GE(s.x.minCoeff(), -1e-8);
  EXPECT_LE(s.x.maxCoeff(), 1.0 + 1e-8);
  EXPECT_LT(2.0 * 3 / s.barrier_tau_final, 1e-6 * 3);
}

TEST(Cr1Test, InvalidOptionsRejected) {
  IpmOptions o;
  o.tau_growth = 1.0;
  EXPECT_THROW(validate(o), std::invalid_argument);
  o = IpmOptions{};
  o.tau0 = 0.0;
  EXPECT_THROW(cr1_lower_bound(laplacian(path_graph(3)), uniform_gains(3), 1, o),
               std::invalid_argument);
}

TEST(MonteCarloTest, TwoPathVariance) {
  MonteCarloOptions o;
  o.horizon = 2000.0;
  o.paths = 10;
  o.seed = 3;
  const MonteCarloEstimate e =
      monte_carlo_variance(laplacian(path_graph(2)), unit_selection(2, {0}), o);
  EXPECT_GE(e.samples, 100000);
  EXPECT_NEAR(e.total_variance, 1.5, 0.05 * 1.5);
}

TEST(MonteCarloTest, LatticeVariance) {
  const Laplacian L = laplacian(build_lattice(3, 3));
  const LeaderSelection sel = unit_selection(9, {4});
  MonteCarloOptions o;
  o.horizon = 4000.0;
  o.seed = 4;
  const double half_j = 0.5 * evaluate_J(L, sel);
  EXPECT_NEAR(monte_carlo_variance(L, sel, o).total_variance, half_j,
              0.05 * half_j);
}

TEST(MonteCarloTest, LargeGainsDriveVarianceToZero) {
  const Laplacian L = laplacian(path_graph(3));
  MonteCarloOptions o;
  o.horizon = 100.0;
  o.dt = 1e-4;
  o.paths = 2;
  const LeaderSelection sel(3, {0, 1}, uniform_gains(3, 1000.0));
  EXPECT_LT(monte_carlo_variance(L, sel, o).total_variance, 0.6);
}

TEST(MonteCarloTest, StepSizeGuard) {
  const Laplacian L = laplacian(build_lattice(3, 3));
  MonteCarloOptions o;
  o.dt = 0.2;  // lambda_max > 2.5 for this lattice
  EXPECT_THROW(monte_carlo_variance(L, unit_selection(9, {4}), o),
               std::invalid_argument);
}

TEST(MonteCarloTest, SeedReplays) {
  const Laplacian L = laplacian(path_graph(4));
  MonteCarloOptions o;
  o.horizon = 50.0;
  o.seed = 99;
  const double a = monte_carlo_variance(L, unit_selection(4, {1}), o).total_variance;
  const double b = monte_carlo_variance(L, unit_selection(4, {1}), o).total_variance;
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace leadsel
