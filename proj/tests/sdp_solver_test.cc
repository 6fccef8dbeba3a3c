#include "momentlmi/sdp_solver.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace momentlmi {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// sup y s.t. [[1, y], [y, 2]] psd, i.e. C = diag(1, 2) and A_1 = -offdiag.
ConicProgram Irrat1() {
  ConicProgram p;
  p.blocks = {{BlockKind::kPsd, 2}};
  p.C.add(0, 0, 0, 1.0);
  p.C.add(0, 1, 1, 2.0);
  SparseBlockMatrix a;
  a.add(0, 0, 1, -1.0);
  p.A = {a};
  p.b = VectorXd::Ones(1);
  return p;
}

TEST(Solve, IrrationalOptimum) {
  const auto sol = solve(Irrat1());
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.y(0), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(sol.dual_obj, std::sqrt(2.0), 1e-6);
}

TEST(Solve, IrrationalOptimumPrimalPair) {
  // The objective is flat to second order in X around the optimum, so X is
  // determined only to about the square root of the gap. Solve tightly.
  SolveOptions tight;
  tight.gap_tol = 1e-12;
  tight.feas_tol = 1e-12;
  const auto sol = solve(Irrat1(), tight);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  // The optimality system in the literature counts the off-diagonal pair of
  // <A, X> once, so its X is twice ours.
  MatrixXd expected(2, 2);
  expected << std::sqrt(2.0), -1.0, -1.0, std::sqrt(2.0) / 2.0;
  EXPECT_TRUE((2.0 * sol.X[0]).isApprox(expected, 1e-5)) << 2.0 * sol.X[0];
  const auto report = duality_report(sol);
  EXPECT_TRUE(report.converged);
  EXPECT_LE(report.complementarity, 1e-6);
  EXPECT_TRUE(report.weak_duality);
}

// sup y1 + y2 + y3 s.t. unit-diagonal correlation matrix psd.
ConicProgram Correlation3() {
  ConicProgram p;
  p.blocks = {{BlockKind::kPsd, 3}};
  for (int i = 0; i < 3; ++i) p.C.add(0, i, i, 1.0);
  const int pos[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& rc : pos) {
    SparseBlockMatrix a;
    a.add(0, rc[0], rc[1], -1.0);
    p.A.push_back(a);
  }
  p.b = VectorXd::Ones(3);
  return p;
}

TEST(Solve, CorrelationMatrixSum) {
  const auto sol = solve(Correlation3());
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.dual_obj, 3.0, 1e-6);

  // Grid oracle: the best feasible grid point sums to at most 3 and the
  // all-ones corner is feasible.
  double best = -1e9;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j)
      for (int k = -10; k <= 10; ++k) {
        const double a = i / 10.0, b = j / 10.0, c = k / 10.0;
        MatrixXd m(3, 3);
        m << 1, a, b, a, 1, c, b, c, 1;
        if (psd_project_check(m, 1e-12).is_psd) best = std::max(best, a + b + c);
      }
  EXPECT_NEAR(best, 3.0, 1e-12);
  EXPECT_LE(sol.dual_obj, best + 1e-6);
}

TEST(Solve, DiagonalLinearProgram) {
  // min x1 + x2 s.t. x1 = 1, x >= 0.
  ConicProgram p;
  p.blocks = {{BlockKind::kNonneg, 2}};
  p.C.add(0, 0, 0, 1.0);
  p.C.add(0, 1, 1, 1.0);
  SparseBlockMatrix a;
  a.add(0, 0, 0, 1.0);
  p.A = {a};
  p.b = VectorXd::Ones(1);
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.primal_obj, 1.0, 1e-7);
  EXPECT_NEAR(sol.dual_obj, 1.0, 1e-7);
  EXPECT_NEAR(sol.X[0](0, 0), 1.0, 1e-7);
  EXPECT_NEAR(sol.X[0](1, 0), 0.0, 1e-7);
}

TEST(Solve, ZeroBlockPinsDualVariable) {
  // Irrat1 plus the equation y = 1 carried by a zero block: optimum is 1.
  ConicProgram p = Irrat1();
  p.blocks.push_back({BlockKind::kZero, 1});
  p.C.add(1, 0, 0, 1.0);
  p.A[0].add(1, 0, 0, 1.0);
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.y(0), 1.0, 1e-8);
}

TEST(Solve, RedundantZeroRowsAreTolerated) {
  // The same equation twice, once scaled.
  ConicProgram p = Irrat1();
  p.blocks.push_back({BlockKind::kZero, 2});
  p.C.add(1, 0, 0, 1.0);
  p.C.add(1, 1, 1, 3.0);
  p.A[0].add(1, 0, 0, 1.0);
  p.A[0].add(1, 1, 1, 3.0);
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.y(0), 1.0, 1e-8);
}

TEST(Solve, InconsistentEqualitiesAreInfeasible) {
  ConicProgram p = Irrat1();
  p.blocks.push_back({BlockKind::kZero, 2});
  p.C.add(1, 0, 0, 1.0);
  p.C.add(1, 1, 1, 2.0);
  p.A[0].add(1, 0, 0, 1.0);
  p.A[0].add(1, 1, 1, 1.0);
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
}

TEST(Solve, UnboundedDualIsFlagged) {
  // sup y s.t. [[1 + y, 0], [0, 1]] psd: y may grow without bound.
  ConicProgram p;
  p.blocks = {{BlockKind::kPsd, 2}};
  p.C.add(0, 0, 0, 1.0);
  p.C.add(0, 1, 1, 1.0);
  SparseBlockMatrix a;
  a.add(0, 0, 0, -1.0);
  p.A = {a};
  p.b = VectorXd::Ones(1);
  EXPECT_EQ(solve(p).status, SolveStatus::kUnbounded);
}

TEST(Solve, IterationBudgetIsReported) {
  SolveOptions o;
  o.max_iter = 2;
  const auto sol = solve(Irrat1(), o);
  EXPECT_EQ(sol.status, SolveStatus::kMaxIter);
  EXPECT_EQ(sol.iterations, 2);
  const auto report = duality_report(sol);
  EXPECT_FALSE(report.converged);
  EXPECT_GT(report.primal_residual + report.dual_residual + report.gap, 0.0);
}

TEST(Solve, RejectsBadOptionsAndStructure) {
  SolveOptions o;
  o.step_fraction = 1.0;
  EXPECT_THROW(solve(Irrat1(), o), std::invalid_argument);
  ConicProgram p = Irrat1();
  p.b = VectorXd::Ones(2);
  EXPECT_THROW(solve(p), std::invalid_argument);
  p = Irrat1();
  p.A[0].add(0, 0, 2, 1.0);
  EXPECT_THROW(solve(p), std::invalid_argument);
}

MatrixXd RandomSpd(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = g(rng);
  return r * r.transpose() + 0.5 * MatrixXd::Identity(n, n);
}

// Random program with a known strictly feasible primal-dual pair.
ConicProgram RandomFeasible(std::mt19937& rng, int n, int m, int lp) {
  std::normal_distribution<double> g;
  ConicProgram p;
  p.blocks = {{BlockKind::kPsd, n}, {BlockKind::kNonneg, lp}};
  const MatrixXd X0 = RandomSpd(rng, n);
  const MatrixXd Z0 = RandomSpd(rng, n);
  VectorXd x0(lp), z0(lp);
  for (int i = 0; i < lp; ++i) {
    x0(i) = 0.5 + std::abs(g(rng));
    z0(i) = 0.5 + std::abs(g(rng));
  }
  VectorXd y0(m);
  for (int k = 0; k < m; ++k) y0(k) = g(rng);
  p.b = VectorXd::Zero(m);
  MatrixXd C = Z0;
  VectorXd c = z0;
  for (int k = 0; k < m; ++k) {
    SparseBlockMatrix a;
    MatrixXd Ak = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = g(rng);
        a.add(0, i, j, v);
        Ak(i, j) += v;
        if (i != j) Ak(j, i) += v;
      }
    VectorXd al(lp);
    for (int i = 0; i < lp; ++i) {
      al(i) = g(rng);
      a.add(1, i, i, al(i));
    }
    p.A.push_back(a);
    p.b(k) = Ak.cwiseProduct(X0).sum() + al.dot(x0);
    C += y0(k) * Ak;
    c += y0(k) * al;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) p.C.add(0, i, j, C(i, j));
  for (int i = 0; i < lp; ++i) p.C.add(1, i, i, c(i));
  return p;
}

TEST(SolveProperties, RandomStrictlyFeasiblePrograms) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 5;
    const int m = 1 + trial % 7;
    const auto p = RandomFeasible(rng, n, m, 1 + trial % 3);
    const auto sol = solve(p);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal) << "trial " << trial;
    const SolveOptions o;
    EXPECT_LE(std::abs(sol.primal_obj - sol.dual_obj), o.gap_tol * (1 + std::abs(sol.dual_obj)));
    EXPECT_LE(sol.primal_residual, o.feas_tol);
    EXPECT_LE(sol.dual_residual, o.feas_tol);
    EXPECT_TRUE(psd_project_check(sol.X[0], o.feas_tol).is_psd);
    EXPECT_TRUE(psd_project_check(sol.Z[0], o.feas_tol).is_psd);
    const auto report = duality_report(sol);
    EXPECT_GE(report.gap, -1e-8);
    EXPECT_LE(report.gap, o.gap_tol * std::max(1.0, std::abs(sol.dual_obj)));
  }
}

TEST(SolveProperties, ScalingCostScalesObjectivesOnly) {
  // A program with a unique dual optimum (sum of correlations).
  const auto base = Correlation3();
  const auto s1 = solve(base);
  for (double lambda : {0.01, 7.0, 300.0}) {
    ConicProgram p = base;
    SparseBlockMatrix c;
    for (const auto& e : base.C.entries()) c.add(e.block, e.row, e.col, lambda * e.value);
    p.C = c;
    // Scaling C alone changes the feasible set of y; scaling b as well keeps
    // y/lambda optimal. Test the invariant on the normalized dual vector.
    const auto s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::kOptimal);
    EXPECT_NEAR(s.dual_obj, lambda * s1.dual_obj, 1e-6 * lambda);
    EXPECT_TRUE((s.y / lambda).isApprox(s1.y, 1e-6));
  }
}

TEST(SolveProperties, ScalingObjectiveKeepsArgmax) {
  // Multiplying the objective (b here, the cost of the dual form) by lambda
  // leaves the optimal y unchanged and scales the value.
  const auto base = Irrat1();
  const auto s1 = solve(base);
  for (double lambda : {0.1, 3.0, 50.0}) {
    ConicProgram p = base;
    p.b *= lambda;
    const auto s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::kOptimal);
    EXPECT_NEAR(s.y(0), s1.y(0), 1e-6);
    EXPECT_NEAR(s.dual_obj, lambda * s1.dual_obj, 1e-6 * lambda);
  }
}

TEST(PsdCheck, Examples) {
  auto id = psd_project_check(MatrixXd::Identity(3, 3), 1e-9);
  EXPECT_NEAR(id.min_eig, 1.0, 1e-14);
  EXPECT_TRUE(id.is_psd);
  MatrixXd m(2, 2);
  m << 1, 2, 2, 1;
  auto r = psd_project_check(m, 1e-9);
  EXPECT_NEAR(r.min_eig, -1.0, 1e-14);
  EXPECT_FALSE(r.is_psd);
  auto ones = psd_project_check(MatrixXd::Ones(3, 3), 1e-9);
  EXPECT_NEAR(ones.min_eig, 0.0, 1e-14);
  EXPECT_TRUE(ones.is_psd);
}

}  // namespace
}  // namespace momentlmi
