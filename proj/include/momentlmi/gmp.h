#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "momentlmi/conic_program.h"
#include "momentlmi/moments.h"
#include "momentlmi/polynomial.h"
#include "momentlmi/relaxation.h"
#include "momentlmi/sdp_solver.h"

namespace momentlmi {

/// A nonnegative measure supported on a basic semialgebraic set. The
/// measure's variables are the support's VarSpace.
struct MeasureDecl {
  std::string name;
  SemialgebraicSet support;

  const VarSpace& space() const { return support.space; }
};

/// <poly, measure>.
struct MomentTerm {
  std::string measure;
  Polynomial poly;
};

/// sum_i <poly_i, measure_i> (relation) rhs.
struct MomentConstraint {
  std::vector<MomentTerm> terms;
  double rhs = 0.0;
  Relation relation = Relation::kEq;
  std::string label;
};

enum class Sense { kMinimize, kMaximize };

/// x' = f(t, x, u) on [0, T]. Polynomials live over space(): the time
/// variable (absent when autonomous) followed by the states and controls.
struct DynamicsSpec {
  std::string time;
  std::vector<std::string> states;
  std::vector<std::string> controls;
  std::vector<Polynomial> f;
  /// Running cost l over space(); zero when there is none.
  Polynomial lagrangian;
  /// Cost on the terminal state, over the state variables only.
  std::optional<Polynomial> terminal_cost;
  /// Fixed horizon T; free when empty.
  std::optional<double> horizon;

  bool autonomous() const { return time.empty(); }
  VarSpace space() const;
  /// Time (if any) followed by the states: the variables of test functions.
  VarSpace test_space() const;
  /// Throws std::invalid_argument on arity or horizon inconsistencies.
  void validate() const;
};

/// Either a measure to optimize over or a fixed point (a Dirac of mass 1).
struct Endpoint {
  std::string measure;
  std::optional<Eigen::VectorXd> point;

  static Endpoint Measure(std::string name) { return {std::move(name), std::nullopt}; }
  static Endpoint Fixed(Eigen::VectorXd x) { return {"", std::move(x)}; }
  bool fixed() const { return point.has_value(); }
};

/// One occupation measure per cell, with the cell's dynamics. The cells'
/// supports are the measures' supports and are assumed pairwise disjoint.
struct LiouvilleCell {
  DynamicsSpec dynamics;
  std::string measure;
};

struct LiouvilleFamily {
  std::vector<LiouvilleCell> cells;
  Endpoint initial;
  Endpoint terminal;
};

struct GMPProblem {
  std::vector<MeasureDecl> measures;
  std::vector<MomentConstraint> constraints;
  std::vector<MomentTerm> objective;
  Sense sense = Sense::kMinimize;
  /// Constant added to the objective (e.g. a terminal cost at a fixed
  /// endpoint).
  double objective_offset = 0.0;
  /// Expanded into Liouville rows at the relaxation order.
  std::vector<LiouvilleFamily> liouville;
  /// Secondary objective, minimized over the solutions whose primary
  /// objective is within tie_break_slack * (1 + |value|) of the optimum.
  /// Picks a representative when the optimal face is large or unbounded
  /// (e.g. occupation measures that may idle at an equilibrium for free).
  std::vector<MomentTerm> tie_break;
  double tie_break_slack = 1e-8;

  /// Index of the named measure; throws std::invalid_argument if unknown.
  int measure_index(const std::string& name) const;
  /// Checks names, arities and that some row is inhomogeneous (otherwise
  /// the zero measure is optimal and the problem is meaningless).
  void validate() const;
};

/// Liouville rows for a single cell:
/// <dv/dt + grad_x v . f, mu> - <v(T, .), mu_T> + <v(0, .), mu_0> = 0 for
/// every test monomial v in time and state. Autonomous dynamics drop the
/// time derivative and test with state monomials only. For a fixed horizon
/// the times 0 and T are substituted and the endpoint measures live on the
/// states; with a free horizon the terminal measure also carries time.
/// Fixed endpoints move into the right-hand side. Variables are matched to
/// the measures' by name. Test degrees are bounded
/// by min(2r, 2r + 1 - deg f) so every row fits the order-r truncation.
std::vector<MomentConstraint> liouville_constraints(const DynamicsSpec& dyn, const std::string& occupation,
                                                    const Endpoint& initial, const Endpoint& terminal,
                                                    const GMPProblem& context, int r,
                                                    std::vector<std::string>* notes = nullptr);

/// As liouville_constraints, with the transport term summed over cells.
std::vector<MomentConstraint> piecewise_liouville(const LiouvilleFamily& family, const GMPProblem& context, int r,
                                                  std::vector<std::string>* notes = nullptr);

/// Appends the family's running costs <l_j, mu_j> and terminal cost to the
/// objective of g; a fixed terminal point contributes a constant.
void add_control_objective(const LiouvilleFamily& family, GMPProblem* g);

/// Time variable slot and horizon of a rescaled occupation measure.
struct TimeScale {
  int time_index = 0;
  double horizon = 1.0;
};

/// Copy of g whose fixed-horizon families run on [0, 1]: their dynamics,
/// the occupation measure supports, and constraint and objective terms on
/// those measures are rewritten in scaled time s = t / T, so that
/// <p, mu> = T <p(T s, .), mu_s>. Measures that need no rescaling are left
/// out of time_scale.
GMPProblem normalize_time(const GMPProblem& g, std::map<std::string, TimeScale>* time_scale = nullptr);

/// Maps moments of a measure in scaled time back to original time:
/// y_alpha *= T^(alpha_t + 1).
MomentVector unscale_time(const MomentVector& y, int time_index, double T);

struct MeasureBlock {
  std::string name;
  int nvars = 0;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct GMPRelaxation {
  ConicProgram program;
  int order = 0;
  std::vector<MeasureBlock> measures;
  /// Sides of the PSD blocks in program order.
  std::vector<int> block_sizes;
  /// Liouville rows generated at this order.
  std::vector<MomentConstraint> generated;
  std::vector<std::string> warnings;
  /// Measures whose moments are in scaled time inside the program.
  std::map<std::string, TimeScale> time_scale;
};

/// Order-r relaxation: one moment group of degree 2r per measure with its
/// M_r and localizing blocks, then the constraint rows (explicit, then
/// Liouville), then support equalities. Degrees above 2r raise
/// std::invalid_argument naming the constraint; orders below a support's
/// r_X raise OrderError.
GMPRelaxation build_gmp_relaxation(const GMPProblem& g, int r);

struct GMPResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  /// Optimal value of the relaxation in the problem's own sense: a lower
  /// bound when minimizing, an upper bound when maximizing.
  double bound = 0.0;
  /// Per-measure moments, in original time units.
  std::map<std::string, MomentVector> moments;
  SDPSolution solution;
  GMPRelaxation relaxation;
};

/// Solves the order-r relaxation. With a tie_break, a second program picks
/// the moments; the bound is always the first program's.
GMPResult solve_gmp(const GMPProblem& g, int r, const SolveOptions& options = {});

/// The POP as a single probability measure "mu" on its feasible set.
GMPProblem gmp_from_pop(const POPProblem& pop);

/// lhs - rhs of the constraint for the given measure moments.
double constraint_residual(const MomentConstraint& c, const std::map<std::string, MomentVector>& moments);

/// "label: 2*<x*u, mu> - <x, muT> = -1".
std::string to_string(const MomentConstraint& c, const GMPProblem& context);

}  // namespace momentlmi
