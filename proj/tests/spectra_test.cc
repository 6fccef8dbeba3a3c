#include "momentlmi/spectra.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace momentlmi {
namespace {

Polynomial P(const char* text, const VarSpace& space) { return parse_polynomial(text, space); }

Pencil Pillow() {
  Pencil p(3, 3);
  for (int i = 0; i < 3; ++i) p.set(0, i, i, 1);
  p.set(1, 0, 1, 1);
  p.set(2, 0, 2, 1);
  p.set(3, 1, 2, 1);
  return p;
}

// diag([[1, 2], [2, y1]], [[1, y1], [y1, y2]], [[1, y2], [y2, y3]]).
Pencil Exponential() {
  std::vector<Pencil> blocks;
  for (int k = 0; k < 3; ++k) {
    Pencil b(3, 2);
    b.set(0, 0, 0, 1);
    if (k == 0) {
      b.set(0, 0, 1, 2);
    } else {
      b.set(k, 0, 1, 1);
    }
    b.set(k + 1, 1, 1, 1);
    blocks.push_back(b);
  }
  return Pencil::BlockDiagonal(blocks);
}

SemialgebraicSet PolyOptSet() {
  SemialgebraicSet set;
  set.space = VarSpace::Numbered(2);
  for (const char* s : {"3 + 2*x2 - x1^2 - x2^2", "-x1 - x2 - x1*x2", "1 + x1*x2"})
    set.inequalities.push_back(P(s, set.space));
  return set;
}

// Sum of the k x k principal minors by direct enumeration.
double PrincipalMinorSum(const Eigen::MatrixXd& F, int k) {
  const int m = static_cast<int>(F.rows());
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) sub(a, b) = F(idx[a], idx[b]);
    sum += sub.determinant();
  }
  return sum;
}

TEST(Defining, Pillow) {
  const VarSpace space = VarSpace::Numbered(3);
  const auto f = defining_polynomials(Pillow());
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], P("3", space));
  EXPECT_EQ(f[1], P("3 - x1^2 - x2^2 - x3^2", space));
  EXPECT_EQ(f[2], P("1 + 2*x1*x2*x3 - x1^2 - x2^2 - x3^2", space));
  for (const auto& p : f) EXPECT_TRUE(p.is_exact());
}

TEST(Defining, DiagonalGivesElementarySymmetricFunctions) {
  const VarSpace space = VarSpace::Numbered(2);
  Pencil p(2, 2);
  p.set(1, 0, 0, 1);
  p.set(2, 1, 1, 1);
  const auto f = defining_polynomials(p);
  EXPECT_EQ(f[0], P("x1 + x2", space));
  EXPECT_EQ(f[1], P("x1*x2", space));
}

TEST(Defining, TwoByTwo) {
  const VarSpace space({"y"});
  Pencil p(1, 2);
  p.set(0, 0, 0, 1);
  p.set(0, 1, 1, 2);
  p.set(1, 0, 1, 1);
  const auto f = defining_polynomials(p);
  EXPECT_EQ(f[0], P("3", space));
  EXPECT_EQ(f[1], P("2 - y^2", space));
}

TEST(Defining, SideAboveBoundThrows) {
  EXPECT_THROW(defining_polynomials(Pencil(1, 9)), std::invalid_argument);
  EXPECT_NO_THROW(defining_polynomials(Pencil(1, 8)));
}

TEST(Defining, MatchesPrincipalMinorsOfRandomPencils) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int m = 1; m <= 6; ++m) {
    Pencil p(2, m);
    for (int k = 0; k <= 2; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) p.set(k, i, j, coef(rng));
    const auto f = defining_polynomials(p);
    for (int trial = 0; trial < 5; ++trial) {
      const double x[2] = {unif(rng), unif(rng)};
      const Eigen::MatrixXd F = p.evaluate(x);
      for (int k = 1; k <= m; ++k) EXPECT_NEAR(f[k - 1].evaluate(x), PrincipalMinorSum(F, k), 1e-8) << m << " " << k;
    }
  }
}

TEST(Membership, Pillow) {
  const double origin[3] = {0, 0, 0};
  const double corner[3] = {1, 1, 1};
  const double outside[3] = {1, 1, -1};
  EXPECT_TRUE(membership(Pillow(), origin));
  EXPECT_TRUE(membership(Pillow(), corner));
  EXPECT_FALSE(membership(Pillow(), outside));
}

TEST(Membership, ExponentialSpectrahedron) {
  const double on[3] = {4, 16, 256};
  const double below[3] = {4, 16, 255.9};
  EXPECT_TRUE(membership(Exponential(), on));
  EXPECT_FALSE(membership(Exponential(), below));
  // Chaining oracle: y1 >= 4, y2 >= y1^2, y3 >= y2^2.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> y1(3.5, 4.5), y2(12, 20), y3(150, 400);
  for (int t = 0; t < 200; ++t) {
    const double y[3] = {y1(rng), y2(rng), y3(rng)};
    const bool chain = y[0] >= 4 && y[1] >= y[0] * y[0] && y[2] >= y[1] * y[1];
    EXPECT_EQ(membership(Exponential(), y), chain) << y[0] << " " << y[1] << " " << y[2];
  }
}

TEST(MembershipProperties, AgreesWithDefiningPolynomials) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-2, 2);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int m = 1; m <= 5; ++m) {
    Pencil p(2, m);
    for (int i = 0; i < m; ++i) p.set(0, i, i, 2);
    for (int k = 1; k <= 2; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) p.set(k, i, j, coef(rng));
    const auto f = defining_polynomials(p);
    for (int trial = 0; trial < 100; ++trial) {
      const double x[2] = {unif(rng), unif(rng)};
      const double scale = 1.0 + p.evaluate(x).cwiseAbs().maxCoeff();
      bool all = true;
      for (const auto& fk : f) all = all && fk.evaluate(x) >= -1e-9 * std::pow(scale, fk.degree());
      EXPECT_EQ(membership(p, x), all) << m;
    }
  }
}

TEST(Shadow, DiskIsItsOwnShadow) {
  SemialgebraicSet disk;
  disk.space = VarSpace::Numbered(2);
  disk.inequalities.push_back(P("1 - x1^2 - x2^2", disk.space));
  const auto dirs = evenly_spaced_directions(8);
  const auto pts = shadow_support_points(disk, 1, dirs, {0, 1});
  ASSERT_EQ(pts.size(), dirs.size());
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    ASSERT_EQ(pts[d].status, SolveStatus::kOptimal);
    EXPECT_NEAR(pts[d].value, 1.0, 1e-6);
    EXPECT_NEAR((pts[d].point - dirs[d]).norm(), 0.0, 1e-4);
  }
}

TEST(Shadow, PolyOptUpperSupport) {
  const std::vector<Eigen::Vector2d> up = {Eigen::Vector2d(0, 1)};
  const auto r1 = shadow_support_points(PolyOptSet(), 1, up, {0, 1});
  const auto r2 = shadow_support_points(PolyOptSet(), 2, up, {0, 1});
  EXPECT_NEAR(r1[0].value, 2.0, 1e-5);
  EXPECT_NEAR(r2[0].value, (1 + std::sqrt(5.0)) / 2, 1e-5);
}

TEST(Shadow, OrderBelowTheSetsThrows) {
  SemialgebraicSet set = PolyOptSet();
  set.inequalities.push_back(P("16 - x1^4", set.space));
  EXPECT_THROW(shadow_support_points(set, 1, evenly_spaced_directions(2), {0, 1}), OrderError);
}

TEST(Shadow, ThreadedMatchesSequential) {
  const auto dirs = evenly_spaced_directions(12);
  ShadowOptions threaded;
  threaded.threads = 4;
  const auto a = shadow_support_points(PolyOptSet(), 1, dirs, {0, 1});
  const auto b = shadow_support_points(PolyOptSet(), 1, dirs, {0, 1}, threaded);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    EXPECT_EQ(a[d].direction, b[d].direction);
    EXPECT_EQ(a[d].value, b[d].value);
  }
}

TEST(ShadowProperties, NestedAcrossOrders) {
  const auto dirs = evenly_spaced_directions(16);
  const auto r1 = shadow_support_points(PolyOptSet(), 1, dirs, {0, 1});
  const auto r2 = shadow_support_points(PolyOptSet(), 2, dirs, {0, 1});
  const auto r3 = shadow_support_points(PolyOptSet(), 3, dirs, {0, 1});
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    EXPECT_LE(r2[d].value, r1[d].value + 1e-6) << d;
    EXPECT_LE(r3[d].value, r2[d].value + 1e-6) << d;
  }
}

TEST(ShadowProperties, SampledPointsLieInsideEveryHalfspace) {
  const SemialgebraicSet set = PolyOptSet();
  const auto dirs = evenly_spaced_directions(32);
  const auto r1 = shadow_support_points(set, 1, dirs, {0, 1});
  const auto r2 = shadow_support_points(set, 2, dirs, {0, 1});
  // x1^2 + (x2 - 1)^2 <= 4 bounds the set.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ux(-2, 2), uy(-1, 3);
  int accepted = 0;
  while (accepted < 200) {
    const double x[2] = {ux(rng), uy(rng)};
    if (!set.contains(x)) continue;
    ++accepted;
    const Eigen::Vector2d z(x[0], x[1]);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      EXPECT_LE(dirs[d].dot(z), r1[d].value + 1e-6);
      EXPECT_LE(dirs[d].dot(z), r2[d].value + 1e-6);
    }
  }
}

}  // namespace
}  // namespace momentlmi
