#include "momentlmi/relaxation.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace momentlmi {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::kEq:
      return "=";
    case Relation::kLe:
      return "<=";
    case Relation::kGe:
      return ">=";
  }
  return "?";
}

std::vector<Polynomial> SemialgebraicSet::assembled_inequalities() const {
  std::vector<Polynomial> out = inequalities;
  if (ball_radius) {
    const int n = space.size();
    Polynomial ball(n, Coefficient(*ball_radius));
    for (int i = 0; i < n; ++i) {
      const Polynomial xi = Polynomial::Variable(n, i);
      ball -= xi * xi;
    }
    out.push_back(std::move(ball));
  }
  return out;
}

bool SemialgebraicSet::contains(std::span<const double> x, double tol) const {
  for (const auto& p : assembled_inequalities()) {
    if (p.evaluate(x) < -tol) return false;
  }
  for (const auto& q : equalities) {
    if (std::abs(q.evaluate(x)) > tol) return false;
  }
  return true;
}

void SemialgebraicSet::validate() const {
  const int n = space.size();
  for (const auto* list : {&inequalities, &equalities}) {
    for (const auto& p : *list) {
      if (p.nvars() != n) {
        throw std::invalid_argument("constraint over " + std::to_string(p.nvars()) +
                                    " variables in a space of " + std::to_string(n));
      }
    }
  }
  if (ball_radius && !(*ball_radius > 0)) throw std::invalid_argument("ball radius must be positive");
}

bool SemialgebraicSet::compactness_certified() const {
  if (ball_radius) return true;
  const int n = space.size();
  std::vector<bool> bounded(n, false);
  for (const auto& q : inequalities) {
    if (q.degree() != 2) continue;
    // Variables of q and the Hessian of its quadratic part.
    std::set<int> used;
    for (const auto& [e, c] : q.terms())
      for (int i = 0; i < n; ++i)
        if (e[i] > 0) used.insert(i);
    const std::vector<int> vars(used.begin(), used.end());
    const int k = static_cast<int>(vars.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [e, c] : q.terms()) {
      if (e.degree() != 2) continue;
      std::vector<int> idx;
      for (int a = 0; a < k; ++a)
        for (int p = 0; p < e[vars[a]]; ++p) idx.push_back(a);
      const double v = c.to_double();
      if (idx[0] == idx[1]) {
        H(idx[0], idx[0]) += 2.0 * v;
      } else {
        H(idx[0], idx[1]) += v;
        H(idx[1], idx[0]) += v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    if (k > 0 && es.eigenvalues().maxCoeff() < 0) {
      for (int v : vars) bounded[v] = true;
    }
  }
  return std::all_of(bounded.begin(), bounded.end(), [](bool b) { return b; });
}

int half_degree(const Polynomial& p) { return (p.degree() + 1) / 2; }

int set_order(const SemialgebraicSet& set) {
  int r = 1;
  for (const auto& p : set.assembled_inequalities()) r = std::max(r, half_degree(p));
  for (const auto& q : set.equalities) r = std::max(r, half_degree(q));
  return r;
}

int minimal_order(const POPProblem& pop) {
  return std::max(set_order(pop.feasible_set), half_degree(pop.objective));
}

// ---------------------------------------------------------------------------

int MomentProgramBuilder::add_group(int nvars, int degree) {
  const std::size_t size = monomial_count(nvars, degree);
  groups_.push_back({nvars, degree, nvars_total_, size});
  nvars_total_ += size;
  objective_.resize(nvars_total_, 0.0);
  return static_cast<int>(groups_.size()) - 1;
}

void MomentProgramBuilder::add_psd(int group, const MatrixStencil& stencil) {
  if (stencil.max_degree() > groups_[group].degree)
    throw std::invalid_argument("stencil needs moments of degree " + std::to_string(stencil.max_degree()));
  psd_.push_back({group, stencil});
  psd_sides_.push_back(stencil.side());
}

void MomentProgramBuilder::add_zero_stencil(int group, const MatrixStencil& stencil) {
  if (stencil.max_degree() > groups_[group].degree)
    throw std::invalid_argument("stencil needs moments of degree " + std::to_string(stencil.max_degree()));
  const std::size_t off = groups_[group].offset;
  for (int i = 0; i < stencil.side(); ++i) {
    for (int j = i; j < stencil.side(); ++j) {
      LinearRow row;
      for (const auto& t : stencil.cell(i, j)) row.terms.emplace_back(off + t.index, t.coefficient.to_double());
      if (!row.terms.empty()) zero_rows_.push_back(std::move(row));
    }
  }
}

void MomentProgramBuilder::add_equality_localizer(int group, const Polynomial& q) {
  const int room = groups_[group].degree - q.degree();
  if (room < 0) throw std::invalid_argument("equality has degree " + std::to_string(q.degree()) + " above the truncation");
  for (const auto& e : monomials_up_to(groups_[group].nvars, room)) {
    LinearRow row = riesz_row(group, q * Polynomial::Monomial(e));
    if (!row.terms.empty()) zero_rows_.push_back(std::move(row));
  }
}

void MomentProgramBuilder::add_row(const LinearRow& row, Relation relation) {
  for (const auto& [j, a] : row.terms) {
    if (j >= nvars_total_) throw std::out_of_range("row references an unknown moment variable");
  }
  switch (relation) {
    case Relation::kEq:
      zero_rows_.push_back(row);
      break;
    case Relation::kGe:
      nonneg_rows_.push_back(row);
      break;
    case Relation::kLe: {
      LinearRow flipped;
      for (const auto& [j, a] : row.terms) flipped.terms.emplace_back(j, -a);
      flipped.rhs = -row.rhs;
      nonneg_rows_.push_back(std::move(flipped));
      break;
    }
  }
}

LinearRow MomentProgramBuilder::riesz_row(int group, const Polynomial& p) const {
  const auto& g = groups_[group];
  if (p.nvars() != g.nvars) throw std::invalid_argument("polynomial arity differs from the measure's");
  if (p.degree() > g.degree) {
    throw std::invalid_argument("degree " + std::to_string(p.degree()) + " exceeds the relaxation's " +
                                std::to_string(g.degree));
  }
  LinearRow row;
  for (const auto& [e, c] : p.terms()) row.terms.emplace_back(g.offset + grlex_index(e), c.to_double());
  return row;
}

void MomentProgramBuilder::add_objective(int group, const Polynomial& p, double weight) {
  for (const auto& [j, a] : riesz_row(group, p).terms) objective_[j] += weight * a;
}

ConicProgram MomentProgramBuilder::build() const {
  ConicProgram prog;
  const std::size_t m = nvars_total_;
  prog.A.resize(m);
  prog.b = Eigen::VectorXd(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) prog.b(static_cast<Eigen::Index>(j)) = -objective_[j];

  int block = 0;
  for (const auto& sb : psd_) {
    const std::size_t off = groups_[sb.group].offset;
    prog.blocks.push_back({BlockKind::kPsd, sb.stencil.side()});
    for (int i = 0; i < sb.stencil.side(); ++i)
      for (int j = i; j < sb.stencil.side(); ++j)
        for (const auto& t : sb.stencil.cell(i, j))
          prog.A[off + t.index].add(block, i, j, -t.coefficient.to_double());
    ++block;
  }
  if (!nonneg_rows_.empty()) {
    prog.blocks.push_back({BlockKind::kNonneg, static_cast<int>(nonneg_rows_.size())});
    for (std::size_t r = 0; r < nonneg_rows_.size(); ++r) {
      const int i = static_cast<int>(r);
      if (nonneg_rows_[r].rhs != 0.0) prog.C.add(block, i, i, -nonneg_rows_[r].rhs);
      for (const auto& [j, a] : nonneg_rows_[r].terms) prog.A[j].add(block, i, i, -a);
    }
    ++block;
  }
  if (!zero_rows_.empty()) {
    prog.blocks.push_back({BlockKind::kZero, static_cast<int>(zero_rows_.size())});
    for (std::size_t r = 0; r < zero_rows_.size(); ++r) {
      const int i = static_cast<int>(r);
      if (zero_rows_[r].rhs != 0.0) prog.C.add(block, i, i, zero_rows_[r].rhs);
      for (const auto& [j, a] : zero_rows_[r].terms) prog.A[j].add(block, i, i, a);
    }
  }
  prog.C.compress();
  for (auto& a : prog.A) a.compress();
  return prog;
}

// ---------------------------------------------------------------------------

Relaxation build_relaxation(const POPProblem& pop, int r) {
  const auto& set = pop.feasible_set;
  set.validate();
  const int n = set.space.size();
  if (pop.objective.nvars() != n) throw std::invalid_argument("objective arity differs from the variable space");
  const int rmin = minimal_order(pop);
  if (r < rmin) {
    throw OrderError("relaxation order " + std::to_string(r) + " is below the minimal order r_X = " +
                         std::to_string(rmin),
                     rmin);
  }

  Relaxation out;
  out.nvars = n;
  out.info.order = r;
  out.info.r_X = set_order(set);
  out.info.moment_dim = monomial_count(n, 2 * r);
  out.info.compactness_certified = set.compactness_certified();
  if (!out.info.compactness_certified) {
    out.info.warnings.push_back(
        "no ball or concave quadratic constraint certifies compactness; convergence of the hierarchy is not "
        "guaranteed");
  }

  MomentProgramBuilder builder;
  const int g = builder.add_group(n, 2 * r);
  builder.add_psd(g, MatrixStencil::Moment(n, r));
  for (const auto& q : set.assembled_inequalities()) {
    const int rk = half_degree(q);
    out.info.r_k.push_back(rk);
    builder.add_psd(g, MatrixStencil::Localizing(q, r - rk));
  }
  builder.add_row(LinearRow{{{0, 1.0}}, 1.0}, Relation::kEq);
  for (const auto& q : set.equalities) {
    const int rk = half_degree(q);
    out.info.r_k.push_back(rk);
    builder.add_equality_localizer(g, q);
  }
  builder.add_objective(g, pop.objective);
  out.info.block_sizes = builder.psd_sides();
  out.program = builder.build();
  return out;
}

RelaxationResult bound_and_moments(const POPProblem& pop, int r, const SolveOptions& options) {
  const Relaxation rel = build_relaxation(pop, r);
  RelaxationResult res;
  res.info = rel.info;
  res.solution = solve(rel.program, options);
  res.status = res.solution.status;
  res.bound = -res.solution.dual_obj;
  const Eigen::VectorXd y = res.solution.y.segment(0, static_cast<Eigen::Index>(rel.info.moment_dim));
  res.moments = MomentVector(rel.nvars, 2 * r, y);
  return res;
}

}  // namespace momentlmi
