#include "momentlmi/extract.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace momentlmi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int numerical_rank(const MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double cut = tol * std::max(1.0, ev(ev.size() - 1));
  return static_cast<int>((ev.array() > cut).count());
}

std::vector<int> moment_ranks(const MomentVector& y, int r, double tol) {
  std::vector<int> ranks;
  for (int s = 0; s <= r; ++s) ranks.push_back(numerical_rank(evaluate_stencil(MatrixStencil::Moment(y.nvars(), s), y), tol));
  return ranks;
}

bool flat_check(const MomentVector& y, int r, int r_X, double tol) {
  if (r < r_X) throw std::invalid_argument("flat_check needs r >= r_X");
  const auto ranks = moment_ranks(y, r, tol);
  return ranks[r - r_X] == ranks[r];
}

Atom rank_one_atom(const MomentVector& y) {
  const int n = y.nvars();
  Atom a;
  a.weight = y.mass();
  a.point = VectorXd(n);
  for (int i = 0; i < n; ++i) a.point(i) = y.at(Exponent::Unit(n, i)) / y.mass();
  return a;
}

double moment_residual(const MomentVector& y, const std::vector<Atom>& atoms, int degree) {
  const int n = y.nvars();
  double worst = 0.0;
  const std::size_t count = monomial_count(n, degree);
  for (std::size_t k = 0; k < count; ++k) {
    const Exponent e = grlex_exponent(n, k);
    double v = 0.0;
    for (const auto& a : atoms) {
      double mono = a.weight;
      for (int i = 0; i < n; ++i) mono *= std::pow(a.point(i), e[i]);
      v += mono;
    }
    worst = std::max(worst, std::abs(v - y[k]));
  }
  return worst;
}

namespace {

// Pivoted Cholesky M ~ L L' with `rank` columns. Pivots: largest remaining
// diagonal, ties to the lowest index.
MatrixXd pivoted_cholesky(const MatrixXd& m, int rank) {
  const int n = static_cast<int>(m.rows());
  MatrixXd L = MatrixXd::Zero(n, rank);
  VectorXd d = m.diagonal();
  std::vector<bool> used(n, false);
  for (int t = 0; t < rank; ++t) {
    int j = -1;
    for (int i = 0; i < n; ++i) {
      if (!used[i] && (j < 0 || d(i) > d(j))) j = i;
    }
    if (d(j) <= 0) break;
    used[j] = true;
    const double piv = std::sqrt(d(j));
    VectorXd col = m.col(j);
    if (t > 0) col -= L.leftCols(t) * L.row(j).head(t).transpose();
    L.col(t) = col / piv;
    for (int i = 0; i < n; ++i) d(i) -= L(i, t) * L(i, t);
    d(j) = 0.0;
  }
  return L;
}

}  // namespace

std::vector<Atom> extract_atoms(const MomentVector& y, int r, const ExtractOptions& options) {
  const int n = y.nvars();
  if (2 * r > y.degree()) throw std::invalid_argument("extract_atoms needs moments up to degree 2r");
  if (!(y.mass() > 0)) throw ExtractionFailed("moment vector has non-positive mass", 0.0);
  const auto ranks = moment_ranks(y, r, options.rank_tol);
  int s = -1;
  for (int t = 1; t <= r; ++t) {
    if (ranks[t - 1] == ranks[t]) {
      s = t;
      break;
    }
  }
  if (s < 0) throw ExtractionFailed("moment matrices are not flat up to order " + std::to_string(r), 0.0);
  const int k = ranks[s];
  const double scale = 1.0 + y.values().head(static_cast<Eigen::Index>(monomial_count(n, 2 * s))).cwiseAbs().maxCoeff();
  const double limit = options.residual_tol * scale;

  std::vector<Atom> atoms;
  if (k == 1 && options.rank_one_shortcut) {
    atoms.push_back(rank_one_atom(y));
  } else {
    const MatrixXd M = evaluate_stencil(MatrixStencil::Moment(n, s), y);
    const MatrixXd L = pivoted_cholesky(M, k);

    // Basis monomials: greedy in grlex order, keeping rows of L that are
    // independent of the ones already chosen.
    const double row_scale = L.rowwise().norm().maxCoeff();
    const double basis_tol = std::max(1e-8, std::sqrt(options.rank_tol)) * row_scale;
    std::vector<int> basis;
    MatrixXd ortho(k, 0);
    for (int i = 0; i < L.rows() && static_cast<int>(basis.size()) < k; ++i) {
      VectorXd v = L.row(i).transpose();
      if (ortho.cols() > 0) v -= ortho * (ortho.transpose() * v);
      if (v.norm() > basis_tol) {
        basis.push_back(i);
        ortho.conservativeResize(k, ortho.cols() + 1);
        ortho.col(ortho.cols() - 1) = v.normalized();
      }
    }
    if (static_cast<int>(basis.size()) < k) throw ExtractionFailed("could not find a monomial basis", 0.0);
    MatrixXd VB(k, k);
    for (int a = 0; a < k; ++a) VB.row(a) = L.row(basis[a]);
    // U expresses every monomial of degree <= s through the basis monomials.
    const MatrixXd U = VB.transpose().partialPivLu().solve(L.transpose()).transpose();

    std::vector<MatrixXd> N(n, MatrixXd(k, k));
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < k; ++a) {
        const Exponent shifted = grlex_exponent(n, basis[a]) + Exponent::Unit(n, i);
        if (shifted.degree() > s) throw ExtractionFailed("basis monomial of maximal degree", 0.0);
        N[i].row(a) = U.row(static_cast<Eigen::Index>(grlex_index(shifted)));
      }
    }
    std::mt19937 rng(options.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    VectorXd lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = unif(rng);
    lambda /= lambda.sum();
    MatrixXd combo = MatrixXd::Zero(k, k);
    for (int i = 0; i < n; ++i) combo += lambda(i) * N[i];
    Eigen::RealSchur<MatrixXd> schur(combo);
    const MatrixXd Q = schur.matrixU();
    for (int j = 0; j < k; ++j) {
      Atom a;
      a.point = VectorXd(n);
      for (int i = 0; i < n; ++i) a.point(i) = Q.col(j).dot(N[i] * Q.col(j));
      atoms.push_back(a);
    }
    // Weights by matching moments up to degree 2s.
    const std::size_t rows = monomial_count(n, 2 * s);
    MatrixXd V(rows, k);
    VectorXd rhs(rows);
    for (std::size_t row = 0; row < rows; ++row) {
      const Exponent e = grlex_exponent(n, row);
      for (int j = 0; j < k; ++j) {
        double mono = 1.0;
        for (int i = 0; i < n; ++i) mono *= std::pow(atoms[j].point(i), e[i]);
        V(static_cast<Eigen::Index>(row), j) = mono;
      }
      rhs(static_cast<Eigen::Index>(row)) = y[row];
    }
    const VectorXd w = V.colPivHouseholderQr().solve(rhs);
    for (int j = 0; j < k; ++j) atoms[j].weight = w(j);
  }

  const double res = moment_residual(y, atoms, 2 * s);
  if (!(res <= limit)) {
    throw ExtractionFailed("rebuilt moments miss y by " + std::to_string(res) + " (limit " +
                               std::to_string(limit) + ")",
                           res);
  }
  return atoms;
}

Certificate certify(const MomentVector& y, int r, int r_X, const SemialgebraicSet* set, const ExtractOptions& options) {
  Certificate c;
  c.order = r;
  c.r_X = r_X;
  c.tol = options.rank_tol;
  c.ranks = moment_ranks(y, r, options.rank_tol);
  c.flat = c.ranks[r - r_X] == c.ranks[r];
  if (!c.flat) return c;
  try {
    c.atoms = extract_atoms(y, r, options);
  } catch (const ExtractionFailed& e) {
    c.extraction_error = e.what();
    c.moment_residual = e.residual();
    return c;
  }
  c.moment_residual = moment_residual(y, c.atoms, 2 * (r - r_X));
  if (set) {
    for (const auto& a : c.atoms) {
      const std::span<const double> x(a.point.data(), static_cast<std::size_t>(a.point.size()));
      for (const auto& p : set->assembled_inequalities()) c.residual = std::max(c.residual, -p.evaluate(x));
      for (const auto& q : set->equalities) c.residual = std::max(c.residual, std::abs(q.evaluate(x)));
    }
  }
  return c;
}

}  // namespace momentlmi
