#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momentlmi/conic_program.h"
#include "momentlmi/moments.h"
#include "momentlmi/polynomial.h"
#include "momentlmi/sdp_solver.h"

namespace momentlmi {

/// {x : p(x) >= 0 for p in inequalities, q(x) = 0 for q in equalities},
/// optionally intersected with the ball ||x||^2 <= ball_radius. All
/// inequalities are treated as closed.
struct SemialgebraicSet {
  VarSpace space;
  std::vector<Polynomial> inequalities;
  std::vector<Polynomial> equalities;
  /// R in the constraint R - sum x_i^2 >= 0 (R bounds the squared norm).
  std::optional<double> ball_radius;

  /// The inequalities with the ball constraint appended when present.
  std::vector<Polynomial> assembled_inequalities() const;
  /// True when x satisfies every constraint within tol.
  bool contains(std::span<const double> x, double tol = 0.0) const;
  /// True when some constraint visibly makes the quadratic module
  /// Archimedean: a ball, or concave quadratics whose variables cover the
  /// whole space.
  bool compactness_certified() const;
  /// Throws std::invalid_argument if a polynomial has the wrong arity.
  void validate() const;
};

/// min p0(x) over x in feasible_set.
struct POPProblem {
  Polynomial objective;
  SemialgebraicSet feasible_set;
};

/// ceil(degree(p) / 2).
int half_degree(const Polynomial& p);

struct RelaxationInfo {
  int order = 0;
  /// Half-degrees of the assembled inequalities followed by the equalities.
  std::vector<int> r_k;
  int r_X = 1;
  /// Sides of the PSD blocks in program order.
  std::vector<int> block_sizes;
  std::size_t moment_dim = 0;
  /// False when nothing certifies compactness; the bounds are then still
  /// valid but convergence of the hierarchy is not guaranteed.
  bool compactness_certified = true;
  std::vector<std::string> warnings;
};

/// Raised when the requested order is below the smallest admissible one.
class OrderError : public std::invalid_argument {
 public:
  OrderError(const std::string& what, int minimal_order)
      : std::invalid_argument(what), minimal_order_(minimal_order) {}
  int minimal_order() const { return minimal_order_; }

 private:
  int minimal_order_;
};

/// max(1, r_k) over the constraints of the set.
int set_order(const SemialgebraicSet& set);
/// Smallest admissible relaxation order: max(r_X, half_degree(p0)).
int minimal_order(const POPProblem& pop);

/// Sparse linear functional sum_j a_j y_j over solver variables.
struct LinearRow {
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs = 0.0;
};

enum class Relation { kEq, kLe, kGe };
std::string to_string(Relation r);

/// Assembles dual-form conic programs whose free variables are the moments
/// of one or more measures. Each measure owns a contiguous range of y
/// (grlex order). PSD blocks come first in insertion order, then one
/// nonnegative block holding all inequality rows, then one zero block
/// holding all equality rows.
class MomentProgramBuilder {
 public:
  /// Adds a group of monomial_count(nvars, degree) moment variables.
  int add_group(int nvars, int degree);
  std::size_t offset(int group) const { return groups_[group].offset; }
  std::size_t group_size(int group) const { return groups_[group].size; }
  int group_degree(int group) const { return groups_[group].degree; }
  std::size_t variable_count() const { return nvars_total_; }

  /// Stencil(y_group) psd.
  void add_psd(int group, const MatrixStencil& stencil);
  /// Each upper-triangle cell of the stencil pinned to zero.
  void add_zero_stencil(int group, const MatrixStencil& stencil);
  /// <q x^alpha> = 0 for every |alpha| <= degree(group) - deg q: all the
  /// entries of the localizing matrix of q that the truncation can express.
  void add_equality_localizer(int group, const Polynomial& q);
  void add_row(const LinearRow& row, Relation relation);
  /// Adds the Riesz functional of p over the group to the objective
  /// (sum_alpha p_alpha y_alpha), to be minimized.
  void add_objective(int group, const Polynomial& p, double weight = 1.0);
  /// Row of the Riesz functional of p over the group.
  LinearRow riesz_row(int group, const Polynomial& p) const;

  /// b is minus the accumulated objective, so bound = -b'y.
  ConicProgram build() const;
  const std::vector<int>& psd_sides() const { return psd_sides_; }

 private:
  struct Group {
    int nvars;
    int degree;
    std::size_t offset;
    std::size_t size;
  };
  struct StencilBlock {
    int group;
    MatrixStencil stencil;
  };
  std::vector<Group> groups_;
  std::size_t nvars_total_ = 0;
  std::vector<StencilBlock> psd_;
  std::vector<int> psd_sides_;
  std::vector<LinearRow> nonneg_rows_;  // a'y - rhs >= 0 form after sign fix
  std::vector<LinearRow> zero_rows_;
  std::vector<double> objective_;
};

struct Relaxation {
  ConicProgram program;
  RelaxationInfo info;
  int nvars = 0;
  /// Moment y_alpha is solver variable grlex_index(alpha).
  std::size_t moment_offset = 0;
};

/// Order-r moment relaxation: min L_y(p0) s.t. y_0 = 1, M_r(y) psd,
/// M_{r - r_k}(p_k y) psd for inequalities, and for equalities every
/// moment <p_k x^alpha> of degree <= 2r pinned to zero. The last set
/// contains the cells of M_{r - r_k}(p_k y) and, for odd deg p_k, also
/// the products of top degree that the square stencil misses.
Relaxation build_relaxation(const POPProblem& pop, int r);

struct RelaxationResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  /// Lower bound p*_r (the solver's objective in the original sense).
  double bound = 0.0;
  MomentVector moments{0, 0};
  SDPSolution solution;
  RelaxationInfo info;
};

RelaxationResult bound_and_moments(const POPProblem& pop, int r, const SolveOptions& options = {});

}  // namespace momentlmi
