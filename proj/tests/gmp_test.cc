#include "momentlmi/gmp.h"

#include <cmath>

#include <gtest/gtest.h>

#include "momentlmi/extract.h"
#include "momentlmi/sdpa_io.h"

namespace momentlmi {
namespace {

const VarSpace kX({"x"});
const VarSpace kXU({"x", "u"});
const VarSpace kTXU({"t", "x", "u"});

Polynomial P(const char* text, const VarSpace& space) { return parse_polynomial(text, space); }

MeasureDecl Measure(const std::string& name, const VarSpace& space, std::vector<const char*> ineqs) {
  MeasureDecl m{name, {}};
  m.support.space = space;
  for (const char* s : ineqs) m.support.inequalities.push_back(P(s, space));
  return m;
}

Eigen::VectorXd Point(double x) { return Eigen::VectorXd::Constant(1, x); }

// Autonomous x' = -x started in [1, 2] and stopped in [-1/2, 1/2],
// minimizing the integral of x^2.
GMPProblem OccTraj() {
  GMPProblem g;
  g.measures = {Measure("mu", kX, {"4 - x^2"}), Measure("mu0", kX, {"1/4 - (x - 3/2)^2"}),
                Measure("muT", kX, {"1/4 - x^2"})};
  g.constraints.push_back({{{"mu0", P("1", kX)}}, 1.0, Relation::kEq, "mass mu0"});
  DynamicsSpec dyn;
  dyn.states = {"x"};
  dyn.f = {P("-x", kX)};
  g.liouville.push_back({{{dyn, "mu"}}, Endpoint::Measure("mu0"), Endpoint::Measure("muT")});
  g.objective.push_back({"mu", P("x^2", kX)});
  return g;
}

GMPProblem Lqr() {
  GMPProblem g;
  g.measures = {Measure("mu", kXU, {})};
  DynamicsSpec dyn;
  dyn.states = {"x"};
  dyn.controls = {"u"};
  dyn.f = {P("u", kXU)};
  dyn.lagrangian = P("x^2 + u^2", kXU);
  LiouvilleFamily fam{{{dyn, "mu"}}, Endpoint::Fixed(Point(1)), Endpoint::Fixed(Point(0))};
  g.liouville.push_back(fam);
  add_control_objective(fam, &g);
  return g;
}

std::map<std::string, MomentVector> OccTrajAnalytic(int degree) {
  Eigen::VectorXd y(degree + 1);
  y(0) = std::log(2.0);
  for (int a = 1; a <= degree; ++a) y(a) = (1 - std::pow(2.0, -a)) / a;
  return {{"mu", MomentVector(1, degree, y)},
          {"mu0", MomentVector::FromAtoms(1, degree, {Point(1)}, {1.0})},
          {"muT", MomentVector::FromAtoms(1, degree, {Point(0.5)}, {1.0})}};
}

TEST(Liouville, OccTrajRowsAreMinusAlphaYEqualsYTMinusY0) {
  const GMPProblem g = OccTraj();
  const auto rows = piecewise_liouville(g.liouville[0], g, 2);
  ASSERT_EQ(rows.size(), 5u);
  for (int a = 0; a <= 4; ++a) {
    const auto& row = rows[a];
    EXPECT_EQ(row.rhs, 0.0);
    const Polynomial xa = Polynomial::Monomial(Exponent({a}));
    std::map<std::string, Polynomial> want = {{"mu0", xa}, {"muT", -xa}};
    if (a > 0) want.emplace("mu", xa * Coefficient(-a));
    ASSERT_EQ(row.terms.size(), want.size()) << "alpha " << a;
    for (const auto& t : row.terms) EXPECT_EQ(t.poly, want.at(t.measure)) << "alpha " << a << " " << t.measure;
  }
  EXPECT_EQ(to_string(rows[2], g), "liouville v = x^2: <-2*x^2, mu> + <x^2, mu0> + <-x^2, muT> = 0");
}

TEST(Liouville, AnalyticOccupationMomentsSatisfyRows) {
  const GMPProblem g = OccTraj();
  for (int r = 1; r <= 4; ++r) {
    const auto moments = OccTrajAnalytic(2 * r);
    for (const auto& row : piecewise_liouville(g.liouville[0], g, r))
      EXPECT_LE(std::abs(constraint_residual(row, moments)), 1e-12) << row.label;
  }
}

TEST(Liouville, ControlledFixedEndpointsMoveToRhs) {
  const GMPProblem g = Lqr();
  const auto rows = piecewise_liouville(g.liouville[0], g, 2);
  // v = 1 is trivial with two unit Diracs; v = x^a gives a <x^(a-1) u> = -1.
  ASSERT_EQ(rows.size(), 4u);
  for (int a = 1; a <= 4; ++a) {
    const auto& row = rows[a - 1];
    EXPECT_EQ(row.rhs, -1.0);
    ASSERT_EQ(row.terms.size(), 1u);
    EXPECT_EQ(row.terms[0].poly, Polynomial::Monomial(Exponent({a - 1, 1}), Coefficient(a)));
  }
}

TEST(Liouville, DegreeTrimForNonlinearDynamics) {
  GMPProblem g = OccTraj();
  g.liouville[0].cells[0].dynamics.f = {P("-x^3", kX)};
  std::vector<std::string> notes;
  const auto rows = piecewise_liouville(g.liouville[0], g, 2, &notes);
  EXPECT_EQ(rows.size(), 3u);  // v = 1, x, x^2
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_NE(notes[0].find("degree 2"), std::string::npos);
}

TEST(Liouville, VariableMismatchIsReported) {
  GMPProblem g = OccTraj();
  g.measures[0].support.space = VarSpace({"y"});
  g.measures[0].support.inequalities = {P("4 - y^2", VarSpace({"y"}))};
  EXPECT_THROW(piecewise_liouville(g.liouville[0], g, 1), std::invalid_argument);
}

TEST(GMP, LqrFirstRelaxationRows) {
  const auto rel = build_gmp_relaxation(Lqr(), 1);
  ASSERT_EQ(rel.block_sizes, (std::vector<int>{3}));
  ASSERT_EQ(rel.generated.size(), 2u);
  const GMPProblem g = Lqr();
  EXPECT_EQ(to_string(rel.generated[0], g), "liouville v = x: <u, mu> = -1");
  EXPECT_EQ(to_string(rel.generated[1], g), "liouville v = x^2: <2*x*u, mu> = -1");
}

TEST(GMP, LqrFirstRelaxationSolution) {
  const auto res = solve_gmp(Lqr(), 1);
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  EXPECT_NEAR(res.bound, 1.0, 1e-3);
  const MomentVector& y = res.moments.at("mu");
  EXPECT_NEAR(y.at(Exponent({1, 0})), 1.0, 1e-2);
  EXPECT_NEAR(y.at(Exponent({0, 1})), -1.0, 1e-2);
  EXPECT_NEAR(y.at(Exponent({2, 0})), 0.5, 1e-2);
  EXPECT_NEAR(y.at(Exponent({1, 1})), -0.5, 1e-2);
  EXPECT_NEAR(y.at(Exponent({0, 2})), 0.5, 1e-2);
  EXPECT_GE(y.mass(), 2.0 - 1e-3);
}

TEST(GMP, OccTrajFourthRelaxation) {
  // Idling at the equilibrium x = 0 costs nothing, so the optimal face is
  // unbounded in the occupation mass; the least-mass representative is
  // the trajectory that stops at x = 1/2.
  GMPProblem g = OccTraj();
  g.tie_break = {{"mu", P("1", kX)}};
  const auto res = solve_gmp(g, 4);
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  EXPECT_NEAR(res.bound, 3.0 / 8.0, 1e-2);
  const MomentVector& y = res.moments.at("mu");
  EXPECT_NEAR(y[0], std::log(2.0), 1e-2);
  for (int a = 1; a <= 4; ++a) EXPECT_NEAR(y[a], (1 - std::pow(2.0, -a)) / a, 1e-2) << a;
  EXPECT_LE(std::abs(res.moments.at("muT").mass() - res.moments.at("mu0").mass()), 1e-8);

  const auto c0 = certify(res.moments.at("mu0"), 4, 1, nullptr);
  const auto cT = certify(res.moments.at("muT"), 4, 1, nullptr);
  EXPECT_EQ(c0.ranks.back(), 1);
  EXPECT_EQ(cT.ranks.back(), 1);
  ASSERT_EQ(c0.atoms.size(), 1u);
  ASSERT_EQ(cT.atoms.size(), 1u);
  EXPECT_NEAR(c0.atoms[0].point(0), 1.0, 1e-3);
  EXPECT_NEAR(cT.atoms[0].point(0), 0.5, 1e-3);
}

TEST(GMPProperties, OccTrajBoundsAreMonotone) {
  double previous = -1e300;
  for (int r = 1; r <= 4; ++r) {
    const auto res = solve_gmp(OccTraj(), r);
    ASSERT_EQ(res.status, SolveStatus::kOptimal) << r;
    EXPECT_GE(res.bound, previous - 1e-6) << r;
    EXPECT_LE(std::abs(res.moments.at("muT").mass() - res.moments.at("mu0").mass()), 1e-8) << r;
    previous = res.bound;
  }
}

TEST(GMP, PopEmbeddingGivesTheSameProgram) {
  POPProblem pop;
  pop.feasible_set.space = VarSpace::Numbered(2);
  pop.objective = P("-x2", pop.feasible_set.space);
  for (const char* s : {"3 + 2*x2 - x1^2 - x2^2", "-x1 - x2 - x1*x2", "1 + x1*x2"})
    pop.feasible_set.inequalities.push_back(P(s, pop.feasible_set.space));
  pop.feasible_set.equalities.push_back(P("x1^2 + x2^2 - 2", pop.feasible_set.space));
  for (int r = 1; r <= 3; ++r) {
    const auto gm = build_gmp_relaxation(gmp_from_pop(pop), r);
    const auto rel = build_relaxation(pop, r);
    EXPECT_EQ(gm.block_sizes, rel.info.block_sizes);
    EXPECT_EQ(to_sdpa(gm.program), to_sdpa(rel.program)) << r;
  }
}

TEST(GMP, DegreeAboveTwiceTheOrderNamesTheConstraint) {
  GMPProblem g = OccTraj();
  g.constraints.push_back({{{"mu", P("x^5", kX)}}, 0.0, Relation::kLe, "fifth moment"});
  try {
    build_gmp_relaxation(g, 2);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("fifth moment"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(build_gmp_relaxation(g, 3));
}

TEST(GMP, HomogeneousProblemIsRejected) {
  GMPProblem g = OccTraj();
  g.constraints.clear();
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(GMP, OrderBelowSupportOrder) {
  GMPProblem g = OccTraj();
  g.measures[0].support.inequalities.push_back(P("16 - x^4", kX));
  EXPECT_THROW(build_gmp_relaxation(g, 1), OrderError);
}

TEST(GMPProperties, TwoCellMassesAreBracketedAroundTheTrueSplit) {
  // x' = 1 from -1/2 to 1/2 through the cells [-1, 0] and [0, 1]: the
  // total time is 1 and each half-interval takes 1/2. A truncation only
  // brackets the split: min and max of the left mass must contain 1/2 and
  // the bracket must not widen as the order grows.
  GMPProblem g;
  g.measures = {Measure("left", kX, {"-x*(1 + x)"}), Measure("right", kX, {"x*(1 - x)"})};
  DynamicsSpec dyn;
  dyn.states = {"x"};
  dyn.f = {P("1", kX)};
  g.liouville.push_back({{{dyn, "left"}, {dyn, "right"}}, Endpoint::Fixed(Point(-0.5)), Endpoint::Fixed(Point(0.5))});
  g.objective = {{"left", P("1", kX)}};
  double previous_width = 2.0;
  for (int r = 2; r <= 5; ++r) {
    double lo = 0.0, hi = 0.0;
    for (Sense sense : {Sense::kMinimize, Sense::kMaximize}) {
      g.sense = sense;
      const auto res = solve_gmp(g, r);
      ASSERT_EQ(res.status, SolveStatus::kOptimal) << r;
      EXPECT_NEAR(res.moments.at("left").mass() + res.moments.at("right").mass(), 1.0, 1e-6) << r;
      (sense == Sense::kMinimize ? lo : hi) = res.bound;
    }
    EXPECT_LE(lo, 0.5 + 1e-6) << r;
    EXPECT_GE(hi, 0.5 - 1e-6) << r;
    EXPECT_LE(hi - lo, previous_width + 1e-6) << r;
    previous_width = hi - lo;
  }
  EXPECT_LT(previous_width, 0.5);
}

TEST(GMP, FixedHorizonIsSolvedInScaledTime) {
  // x' = 1 from x(0) = 0 over [0, 2]: mass 2, <t> = <x> = 2, x(2) = 2.
  const VarSpace tx({"t", "x"});
  GMPProblem g;
  g.measures = {Measure("mu", tx, {"t*(2 - t)", "9 - x^2"}), Measure("muT", kX, {"9 - x^2"})};
  DynamicsSpec dyn;
  dyn.time = "t";
  dyn.states = {"x"};
  dyn.f = {P("1", tx)};
  dyn.horizon = 2.0;
  g.liouville.push_back({{{dyn, "mu"}}, Endpoint::Fixed(Point(0)), Endpoint::Measure("muT")});
  g.objective = {{"mu", P("x", tx)}};
  const auto rel = build_gmp_relaxation(g, 2);
  ASSERT_EQ(rel.time_scale.count("mu"), 1u);
  EXPECT_EQ(rel.time_scale.at("mu").horizon, 2.0);
  const auto res = solve_gmp(g, 2);
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  EXPECT_NEAR(res.bound, 2.0, 1e-5);
  const MomentVector& y = res.moments.at("mu");
  EXPECT_NEAR(y.mass(), 2.0, 1e-6);
  EXPECT_NEAR(y.at(Exponent({1, 0})), 2.0, 1e-5);
  EXPECT_NEAR(y.at(Exponent({2, 0})), 8.0 / 3.0, 1e-4);
  EXPECT_NEAR(res.moments.at("muT").at(Exponent({1})), 2.0, 1e-5);
}

}  // namespace
}  // namespace momentlmi
