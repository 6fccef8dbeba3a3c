#include "momentlmi/sdp_solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace momentlmi {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kMaxIter:
      return "max_iter";
    case SolveStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "?";
}

void SolveOptions::validate() const {
  if (!(gap_tol > 0) || !(feas_tol > 0) || max_iter <= 0)
    throw std::invalid_argument("solver tolerances and max_iter must be positive");
  if (!(step_fraction > 0) || !(step_fraction < 1))
    throw std::invalid_argument("step_fraction must lie in (0, 1)");
}

PsdCheck psd_project_check(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("psd_project_check needs a square matrix");
  if (m.size() == 0) return {0.0, true};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return {lo, lo >= -tol};
}

namespace {

// The Newton system near the optimum is conditioned like 1/mu; extended
// precision keeps the last digits of the residuals meaningful.
using Real = long double;
using MatrixXd = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXd = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr Real kDivergence = 1e10;
constexpr Real kNeighborhood = 1e-2;

struct Term {
  int row;
  int col;
  Real value;
};

// Entries of one constraint matrix restricted to one cone block. PSD terms
// hold both triangles explicitly.
struct ConstraintSlice {
  int k;
  std::vector<Term> terms;
};

struct Cone {
  BlockKind kind;
  int block;
  int size;
  std::vector<ConstraintSlice> slices;
  MatrixXd C;
  bool dense_schur = false;
};

struct Direction {
  std::vector<MatrixXd> dX;
  std::vector<MatrixXd> dZ;
  VectorXd dy;
  VectorXd dxf;
};

Real inner(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
  Real s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

Real frob(const std::vector<MatrixXd>& a) { return std::sqrt(inner(a, a)); }

class InteriorPoint {
 public:
  InteriorPoint(const ConicProgram& program, const SolveOptions& options)
      : program_(program), options_(options), m_(program.m()) {
    setup();
  }

  SDPSolution run();

 private:
  void setup();
  void factor_free_rows();
  void initial_point();

  VectorXd apply_A(const std::vector<MatrixXd>& w) const;
  std::vector<MatrixXd> apply_At(const VectorXd& y) const;
  MatrixXd schur() const;
  bool factor_schur(const MatrixXd& M);
  Direction direction(const std::vector<MatrixXd>& H, const std::vector<MatrixXd>& Rd,
                      const VectorXd& rp, const VectorXd& re, const MatrixXd& M) const;
  void solve_kkt(const VectorXd& g, const VectorXd& re, const MatrixXd& M, VectorXd* dy, VectorXd* dxf) const;
  Real max_step(const std::vector<MatrixXd>& V, const std::vector<MatrixXd>& dV) const;
  bool interior(const std::vector<MatrixXd>& V) const;
  Real centrality(const std::vector<MatrixXd>& X, const std::vector<MatrixXd>& Z) const;
  bool invert_Z();
  SDPSolution finish(SolveStatus status, int iterations, Real mu) const;

  const ConicProgram& program_;
  SolveOptions options_;
  int m_;
  std::vector<Cone> cones_;
  int nu_ = 0;
  VectorXd b_;
  Real norm_b_ = 0.0;
  Real norm_C_ = 0.0;

  // Zero blocks: free primal variables x_f with columns E and costs c_f, i.e.
  // dual equality rows E'y = c_f.
  std::vector<std::pair<int, int>> free_pos_;
  MatrixXd E_;
  VectorXd cf_;
  bool has_free_ = false;
  int rank_E_ = 0;
  MatrixXd Q1_;
  MatrixXd Q2_;
  MatrixXd R11_;
  Eigen::VectorXi perm_;
  bool equalities_consistent_ = true;

  // Per-iteration factorization of the Newton system in the Jacobi-scaled
  // variables dy = D dy~, with the null space of (D E)' recomputed so that
  // it does not mix moments of very different magnitudes.
  VectorXd D_;
  MatrixXd Ms_;
  MatrixXd sQ1_;
  MatrixXd sQ2_;
  MatrixXd sR11_;
  Eigen::VectorXi sperm_;
  Eigen::LLT<MatrixXd> chol_;

  std::vector<MatrixXd> X_;
  std::vector<MatrixXd> Z_;
  std::vector<MatrixXd> Zinv_;
  VectorXd y_;
  VectorXd xf_;

  Real last_prel_ = 0.0;
  Real last_drel_ = 0.0;
};

void InteriorPoint::setup() {
  program_.validate();
  options_.validate();
  std::vector<int> cone_of(program_.blocks.size(), -1);
  std::map<std::pair<int, int>, int> free_index;
  for (int b = 0; b < static_cast<int>(program_.blocks.size()); ++b) {
    const auto& spec = program_.blocks[b];
    if (spec.kind == BlockKind::kZero) {
      for (int i = 0; i < spec.size; ++i) {
        free_index[{b, i}] = static_cast<int>(free_pos_.size());
        free_pos_.emplace_back(b, i);
      }
      continue;
    }
    cone_of[b] = static_cast<int>(cones_.size());
    Cone cone{spec.kind, b, spec.size, {}, {}};
    cone.C = spec.kind == BlockKind::kPsd ? MatrixXd::Zero(spec.size, spec.size)
                                          : MatrixXd::Zero(spec.size, 1);
    cones_.push_back(std::move(cone));
    nu_ += spec.size;
  }
  const int nf = static_cast<int>(free_pos_.size());
  has_free_ = nf > 0;
  E_ = MatrixXd::Zero(m_, nf);
  cf_ = VectorXd::Zero(nf);

  auto scatter = [&](const SparseBlockMatrix& s, int k) {
    std::map<int, std::vector<Term>> per_cone;
    for (const auto& e : s.entries()) {
      const auto kind = program_.blocks[e.block].kind;
      if (kind == BlockKind::kZero) {
        const int f = free_index.at({e.block, e.row});
        if (k < 0) {
          cf_(f) += e.value;
        } else {
          E_(k, f) += e.value;
        }
        continue;
      }
      const int c = cone_of[e.block];
      if (k < 0) {
        if (kind == BlockKind::kPsd) {
          cones_[c].C(e.row, e.col) += e.value;
          if (e.row != e.col) cones_[c].C(e.col, e.row) += e.value;
        } else {
          cones_[c].C(e.row, 0) += e.value;
        }
        continue;
      }
      auto& terms = per_cone[c];
      terms.push_back({e.row, e.col, e.value});
      if (kind == BlockKind::kPsd && e.row != e.col) terms.push_back({e.col, e.row, e.value});
    }
    for (auto& [c, terms] : per_cone) {
      // Merge duplicates so the Schur loops see each position once.
      std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
      std::vector<Term> merged;
      for (const auto& t : terms) {
        if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col) {
          merged.back().value += t.value;
        } else {
          merged.push_back(t);
        }
      }
      std::erase_if(merged, [](const Term& t) { return t.value == 0.0; });
      if (!merged.empty()) cones_[c].slices.push_back({k, std::move(merged)});
    }
  };
  scatter(program_.C, -1);
  for (int k = 0; k < m_; ++k) scatter(program_.A[k], k);

  for (auto& cone : cones_) {
    if (cone.kind != BlockKind::kPsd) continue;
    Real nnz = 0.0;
    for (const auto& s : cone.slices) nnz += static_cast<Real>(s.terms.size());
    const Real mb = static_cast<Real>(cone.slices.size());
    const Real n = cone.size;
    const Real sparse_cost = 0.5 * nnz * nnz;
    const Real dense_cost = mb * n * n * n + nnz * n + mb * nnz;
    cone.dense_schur = dense_cost < sparse_cost;
  }

  b_ = program_.b.cast<Real>();
  norm_b_ = b_.norm();
  Real c2 = cf_.squaredNorm();
  for (const auto& cone : cones_) c2 += cone.C.squaredNorm();
  norm_C_ = std::sqrt(c2);

  factor_free_rows();
}

void InteriorPoint::factor_free_rows() {
  if (!has_free_) return;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(E_);
  qr.setThreshold(1e-11);
  rank_E_ = static_cast<int>(qr.rank());
  const MatrixXd Q = qr.householderQ();
  Q1_ = Q.leftCols(rank_E_);
  Q2_ = Q.rightCols(m_ - rank_E_);
  R11_ = qr.matrixR().topLeftCorner(rank_E_, rank_E_).triangularView<Eigen::Upper>();
  perm_ = qr.colsPermutation().indices();
}

VectorXd InteriorPoint::apply_A(const std::vector<MatrixXd>& w) const {
  VectorXd v = VectorXd::Zero(m_);
  for (std::size_t c = 0; c < cones_.size(); ++c) {
    const auto& cone = cones_[c];
    for (const auto& s : cone.slices) {
      Real sum = 0.0;
      if (cone.kind == BlockKind::kPsd) {
        for (const auto& t : s.terms) sum += t.value * w[c](t.row, t.col);
      } else {
        for (const auto& t : s.terms) sum += t.value * w[c](t.row, 0);
      }
      v(s.k) += sum;
    }
  }
  return v;
}

std::vector<MatrixXd> InteriorPoint::apply_At(const VectorXd& y) const {
  std::vector<MatrixXd> out;
  out.reserve(cones_.size());
  for (const auto& cone : cones_) {
    MatrixXd acc = MatrixXd::Zero(cone.C.rows(), cone.C.cols());
    for (const auto& s : cone.slices) {
      const Real yk = y(s.k);
      if (yk == 0.0) continue;
      if (cone.kind == BlockKind::kPsd) {
        for (const auto& t : s.terms) acc(t.row, t.col) += yk * t.value;
      } else {
        for (const auto& t : s.terms) acc(t.row, 0) += yk * t.value;
      }
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// M_kl = sum over cones of tr(A_k X A_l Z^-1).
MatrixXd InteriorPoint::schur() const {
  MatrixXd M = MatrixXd::Zero(m_, m_);
  for (std::size_t c = 0; c < cones_.size(); ++c) {
    const auto& cone = cones_[c];
    const MatrixXd& X = X_[c];
    const MatrixXd& Zi = Zinv_[c];
    const auto& sl = cone.slices;
    if (cone.kind == BlockKind::kNonneg) {
      std::vector<std::vector<std::pair<int, Real>>> by_pos(cone.size);
      for (const auto& s : sl)
        for (const auto& t : s.terms) by_pos[t.row].emplace_back(s.k, t.value);
      for (int i = 0; i < cone.size; ++i) {
        const Real d = X(i, 0) * Zi(i, 0);
        for (const auto& [k, a] : by_pos[i])
          for (const auto& [l, b] : by_pos[i]) M(k, l) += d * a * b;
      }
      continue;
    }
    if (cone.dense_schur) {
      const int n = cone.size;
      MatrixXd W(n, n);
      for (const auto& sb : sl) {
        W.setZero();
        for (const auto& t : sb.terms) W.col(t.col) += t.value * X.col(t.row);
        const MatrixXd G = W * Zi;
        for (const auto& sa : sl) {
          Real sum = 0.0;
          for (const auto& t : sa.terms) sum += t.value * G(t.col, t.row);
          M(sa.k, sb.k) += sum;
        }
      }
      continue;
    }
    for (std::size_t a = 0; a < sl.size(); ++a) {
      const auto& ta = sl[a].terms;
      for (std::size_t b = a; b < sl.size(); ++b) {
        const auto& tb = sl[b].terms;
        Real sum = 0.0;
        for (const auto& p : ta) {
          for (const auto& q : tb) sum += p.value * q.value * X(p.col, q.row) * Zi(q.col, p.row);
        }
        M(sl[a].k, sl[b].k) += sum;
        if (a != b) M(sl[b].k, sl[a].k) += sum;
      }
    }
  }
  return 0.5 * (M + M.transpose());
}

bool InteriorPoint::factor_schur(const MatrixXd& M) {
  D_ = VectorXd::Ones(m_);
  for (int k = 0; k < m_; ++k) {
    if (M(k, k) > 0) D_(k) = 1.0 / std::sqrt(M(k, k));
  }
  Ms_ = D_.asDiagonal() * M * D_.asDiagonal();
  MatrixXd R = Ms_;
  if (has_free_) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(D_.asDiagonal() * E_);
    const MatrixXd Q = qr.householderQ();
    sQ1_ = Q.leftCols(rank_E_);
    sQ2_ = Q.rightCols(m_ - rank_E_);
    sR11_ = qr.matrixR().topLeftCorner(rank_E_, rank_E_).triangularView<Eigen::Upper>();
    sperm_ = qr.colsPermutation().indices();
    R = sQ2_.transpose() * Ms_ * sQ2_;
  }
  if (R.rows() == 0) return true;
  chol_.compute(R);
  if (chol_.info() == Eigen::Success) return true;
  const Real reg = 1e-12 * std::max<Real>(1.0, R.diagonal().cwiseAbs().maxCoeff());
  R.diagonal().array() += reg;
  chol_.compute(R);
  return chol_.info() == Eigen::Success;
}

Direction InteriorPoint::direction(const std::vector<MatrixXd>& H, const std::vector<MatrixXd>& Rd,
                                   const VectorXd& rp, const VectorXd& re, const MatrixXd& M) const {
  std::vector<MatrixXd> T(cones_.size());
  for (std::size_t c = 0; c < cones_.size(); ++c) {
    if (cones_[c].kind == BlockKind::kPsd) {
      T[c] = H[c] - X_[c] * Rd[c] * Zinv_[c];
    } else {
      T[c] = H[c] - X_[c].cwiseProduct(Rd[c]).cwiseProduct(Zinv_[c]);
    }
  }
  const VectorXd g = rp - apply_A(T);

  Direction d;
  solve_kkt(g, re, M, &d.dy, &d.dxf);
  // Iterative refinement: near the optimum the reduced Schur complement is
  // badly conditioned and the primal residual only shrinks as fast as the
  // saddle system is solved accurately.
  for (int round = 0; round < 2 && m_ > 0; ++round) {
    VectorXd r1 = g - M * d.dy;
    if (has_free_) r1 -= E_ * d.dxf;
    const VectorXd r2 = has_free_ ? VectorXd(re - E_.transpose() * d.dy) : VectorXd();
    if (r1.norm() + r2.norm() <= 1e-15 * (1.0 + g.norm() + re.norm())) break;
    VectorXd cy, cf;
    solve_kkt(r1, r2, M, &cy, &cf);
    d.dy += cy;
    if (has_free_) d.dxf += cf;
  }

  auto assemble = [&](Direction* dd) {
    const auto At = apply_At(dd->dy);
    dd->dZ.resize(cones_.size());
    dd->dX.resize(cones_.size());
    for (std::size_t c = 0; c < cones_.size(); ++c) {
      dd->dZ[c] = Rd[c] - At[c];
      if (cones_[c].kind == BlockKind::kPsd) {
        const MatrixXd dx = H[c] - X_[c] * dd->dZ[c] * Zinv_[c];
        dd->dX[c] = 0.5 * (dx + dx.transpose());
      } else {
        dd->dX[c] = H[c] - X_[c].cwiseProduct(dd->dZ[c]).cwiseProduct(Zinv_[c]);
      }
    }
  };
  auto primal_gap = [&](const Direction& dd) {
    VectorXd r = rp - apply_A(dd.dX);
    if (has_free_) r -= E_ * dd.dxf;
    return r;
  };
  assemble(&d);
  // Refinement against the operator actually applied to dX. The Schur
  // complement carries rounding of order eps * cond(Z), which near the
  // optimum is far above the accuracy needed for primal feasibility.
  VectorXd r = primal_gap(d);
  for (int round = 0; round < 3 && m_ > 0; ++round) {
    const Real before = r.norm();
    if (before <= 1e-14 * (1.0 + rp.norm())) break;
    const VectorXd r2 = has_free_ ? VectorXd(re - E_.transpose() * d.dy) : VectorXd();
    VectorXd cy, cf;
    solve_kkt(r, r2, M, &cy, &cf);
    Direction trial = d;
    trial.dy += cy;
    if (has_free_) trial.dxf += cf;
    assemble(&trial);
    VectorXd r_new = primal_gap(trial);
    if (!(r_new.norm() < before)) break;
    d = std::move(trial);
    r = std::move(r_new);
  }
  // Refit the free-variable step against the primal residual actually left
  // by dX, absorbing rounding in the Schur complement along range(E).
  if (has_free_ && rank_E_ > 0) {
    const VectorXd h = Q1_.transpose() * (rp - apply_A(d.dX));
    const VectorXd u = R11_.triangularView<Eigen::Upper>().solve(h);
    d.dxf.setZero();
    for (int i = 0; i < rank_E_; ++i) d.dxf(perm_(i)) = u(i);
  }
  return d;
}

// Solves [M E; E' 0] [dy; dxf] = [g; re] through the null space of E',
// using the scaled factorization from factor_schur.
void InteriorPoint::solve_kkt(const VectorXd& g, const VectorXd& re, const MatrixXd& /*M*/, VectorXd* dy,
                              VectorXd* dxf) const {
  const VectorXd gs = D_.cwiseProduct(g);
  if (!has_free_) {
    *dy = m_ > 0 ? VectorXd(D_.cwiseProduct(chol_.solve(gs))) : VectorXd();
    *dxf = VectorXd();
    return;
  }
  VectorXd ys = VectorXd::Zero(m_);
  if (rank_E_ > 0) {
    VectorXd pre(rank_E_);
    for (int i = 0; i < rank_E_; ++i) pre(i) = re(sperm_(i));
    ys = sQ1_ * sR11_.transpose().triangularView<Eigen::Lower>().solve(pre);
  }
  if (sQ2_.cols() > 0) ys += sQ2_ * chol_.solve(sQ2_.transpose() * (gs - Ms_ * ys));
  *dxf = VectorXd::Zero(E_.cols());
  if (rank_E_ > 0) {
    const VectorXd h = sQ1_.transpose() * (gs - Ms_ * ys);
    const VectorXd u = sR11_.triangularView<Eigen::Upper>().solve(h);
    for (int i = 0; i < rank_E_; ++i) (*dxf)(sperm_(i)) = u(i);
  }
  *dy = D_.cwiseProduct(ys);
}

// Largest alpha with V + alpha dV in the cone (infinity when unrestricted).
Real InteriorPoint::max_step(const std::vector<MatrixXd>& V, const std::vector<MatrixXd>& dV) const {
  Real alpha = std::numeric_limits<Real>::infinity();
  for (std::size_t c = 0; c < cones_.size(); ++c) {
    if (cones_[c].kind == BlockKind::kPsd) {
      Eigen::LLT<MatrixXd> llt(V[c]);
      if (llt.info() != Eigen::Success) return 0.0;
      const MatrixXd Linv_dV = llt.matrixL().solve(dV[c]);
      MatrixXd S = llt.matrixL().solve(Linv_dV.transpose());
      S = 0.5 * (S + S.transpose());
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
      const Real lo = es.eigenvalues()(0);
      if (lo < 0) alpha = std::min<Real>(alpha, -1.0 / lo);
    } else {
      for (int i = 0; i < cones_[c].size; ++i) {
        if (dV[c](i, 0) < 0) alpha = std::min<Real>(alpha, -V[c](i, 0) / dV[c](i, 0));
      }
    }
  }
  return alpha;
}

bool InteriorPoint::interior(const std::vector<MatrixXd>& V) const {
  for (std::size_t c = 0; c < cones_.size(); ++c) {
    if (cones_[c].kind == BlockKind::kPsd) {
      Eigen::LLT<MatrixXd> llt(V[c]);
      if (llt.info() != Eigen::Success) return false;
    } else if ((V[c].array() <= 0).any()) {
      return false;
    }
  }
  return true;
}

// Smallest eigenvalue of X^(1/2) Z X^(1/2) relative to the mean mu. Equals 1
// exactly on the central path.
Real InteriorPoint::centrality(const std::vector<MatrixXd>& X, const std::vector<MatrixXd>& Z) const {
  const Real mu = inner(X, Z) / nu_;
  if (!(mu > 0)) return 0.0;
  Real lo = std::numeric_limits<Real>::infinity();
  for (std::size_t c = 0; c < cones_.size(); ++c) {
    if (cones_[c].kind == BlockKind::kPsd) {
      Eigen::LLT<MatrixXd> llt(X[c]);
      const MatrixXd L = llt.matrixL();
      MatrixXd S = L.transpose() * Z[c] * L;
      S = 0.5 * (S + S.transpose());
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
      lo = std::min<Real>(lo, es.eigenvalues()(0));
    } else {
      lo = std::min<Real>(lo, X[c].cwiseProduct(Z[c]).minCoeff());
    }
  }
  return lo / mu;
}

bool InteriorPoint::invert_Z() {
  Zinv_.resize(cones_.size());
  for (std::size_t c = 0; c < cones_.size(); ++c) {
    if (cones_[c].kind == BlockKind::kPsd) {
      Eigen::LLT<MatrixXd> llt(Z_[c]);
      if (llt.info() != Eigen::Success) return false;
      Zinv_[c] = llt.solve(MatrixXd::Identity(cones_[c].size, cones_[c].size));
      Zinv_[c] = 0.5 * (Zinv_[c] + Zinv_[c].transpose());
    } else {
      Zinv_[c] = Z_[c].cwiseInverse();
    }
  }
  return true;
}

void InteriorPoint::initial_point() {
  // Scaled identities in the spirit of SDPT3: large enough to dominate the
  // data so that the first Newton steps are well centered.
  X_.clear();
  Z_.clear();
  for (const auto& cone : cones_) {
    const Real n = cone.size;
    Real max_ratio = 0.0;
    Real max_a = 0.0;
    for (const auto& s : cone.slices) {
      Real a2 = 0.0;
      for (const auto& t : s.terms) a2 += t.value * t.value;
      const Real na = std::sqrt(a2);
      max_a = std::max<Real>(max_a, na);
      max_ratio = std::max<Real>(max_ratio, (1.0 + std::abs(b_(s.k))) / (1.0 + na));
    }
    const Real xi = std::max<Real>({10.0, std::sqrt(n), std::sqrt(n) * max_ratio});
    const Real eta = std::max<Real>({10.0, std::sqrt(n), max_a, cone.C.norm()});
    if (cone.kind == BlockKind::kPsd) {
      X_.push_back(xi * MatrixXd::Identity(cone.size, cone.size));
      Z_.push_back(eta * MatrixXd::Identity(cone.size, cone.size));
    } else {
      X_.push_back(MatrixXd::Constant(cone.size, 1, xi));
      Z_.push_back(MatrixXd::Constant(cone.size, 1, eta));
    }
  }
  y_ = VectorXd::Zero(m_);
  xf_ = VectorXd::Zero(E_.cols());
  if (has_free_ && rank_E_ > 0) {
    VectorXd pre(rank_E_);
    for (int i = 0; i < rank_E_; ++i) pre(i) = cf_(perm_(i));
    const VectorXd z1 = R11_.transpose().triangularView<Eigen::Lower>().solve(pre);
    y_ = Q1_ * z1;
    const Real resid = (E_.transpose() * y_ - cf_).norm();
    equalities_consistent_ = resid <= 1e-8 * (1.0 + cf_.norm());
  }
}

SDPSolution InteriorPoint::run() {
  initial_point();
  if (!equalities_consistent_) return finish(SolveStatus::kInfeasible, 0, 0.0);

  if (cones_.empty()) {
    // Only equality rows: y is pinned to an affine set. Bounded iff b is
    // orthogonal to its free directions.
    const bool bounded = Q2_.cols() == 0 || (Q2_.transpose() * b_).norm() <=
                                                1e-9 * (1.0 + norm_b_);
    if (!bounded) return finish(SolveStatus::kUnbounded, 0, 0.0);
    if (rank_E_ > 0) {
      const VectorXd h = Q1_.transpose() * b_;
      const VectorXd u = R11_.triangularView<Eigen::Upper>().solve(h);
      for (int i = 0; i < rank_E_; ++i) xf_(perm_(i)) = u(i);
    }
    return finish(SolveStatus::kOptimal, 0, 0.0);
  }

  const Real gamma = options_.step_fraction;
  int stalls = 0;
  Real mu = 0.0;
  auto fail = [&](const char* why, int it) {
    if (options_.verbose) std::fprintf(stderr, "numerical failure: %s\n", why);
    return finish(SolveStatus::kNumericalFailure, it, mu);
  };
  for (int iter = 0; iter <= options_.max_iter; ++iter) {
    if (!invert_Z()) return fail("Z lost definiteness", iter);

    const auto At_y = apply_At(y_);
    std::vector<MatrixXd> Rd(cones_.size());
    for (std::size_t c = 0; c < cones_.size(); ++c) Rd[c] = cones_[c].C - Z_[c] - At_y[c];
    VectorXd rp = b_ - apply_A(X_);
    if (has_free_) rp -= E_ * xf_;
    const VectorXd re = has_free_ ? VectorXd(cf_ - E_.transpose() * y_) : VectorXd();

    Real pobj = 0.0;
    for (std::size_t c = 0; c < cones_.size(); ++c) pobj += cones_[c].C.cwiseProduct(X_[c]).sum();
    if (has_free_) pobj += cf_.dot(xf_);
    const Real dobj = b_.dot(y_);
    const Real gap = inner(X_, Z_);
    mu = gap / nu_;
    const Real prel = rp.norm() / (1.0 + norm_b_);
    Real drel = frob(Rd) / (1.0 + norm_C_);
    if (has_free_) drel = std::max<Real>(drel, re.norm() / (1.0 + cf_.norm()));
    last_prel_ = prel;
    last_drel_ = drel;

    if (options_.verbose) {
      std::fprintf(stderr, "%3d  pobj %+.10Le  dobj %+.10Le  prel %.2Le  drel %.2Le  mu %.2Le\n", iter,
                   pobj, dobj, prel, drel, mu);
    }
    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu))
      return fail("non-finite iterate", iter);

    const Real scale = std::max<Real>(1.0, std::abs(dobj));
    if (prel <= options_.feas_tol && drel <= options_.feas_tol &&
        std::abs(pobj - dobj) <= options_.gap_tol * (1.0 + std::abs(dobj)) &&
        gap <= options_.gap_tol * scale) {
      return finish(SolveStatus::kOptimal, iter, mu);
    }
    if (dobj > kDivergence * (1.0 + norm_b_) && drel <= 1e-6) return finish(SolveStatus::kUnbounded, iter, mu);
    if (pobj < -kDivergence * (1.0 + norm_C_) && prel <= 1e-6) return finish(SolveStatus::kInfeasible, iter, mu);
    if (iter == options_.max_iter) break;

    const MatrixXd M = schur();
    if (!factor_schur(M)) return fail("Schur complement not positive definite", iter);

    // Predictor.
    std::vector<MatrixXd> H(cones_.size());
    for (std::size_t c = 0; c < cones_.size(); ++c) H[c] = -X_[c];
    const Direction aff = direction(H, Rd, rp, re, M);
    const Real ap_aff = std::min<Real>(1.0, max_step(X_, aff.dX));
    const Real ad_aff = std::min<Real>(1.0, max_step(Z_, aff.dZ));
    Real gap_aff = 0.0;
    for (std::size_t c = 0; c < cones_.size(); ++c) {
      gap_aff += (X_[c] + ap_aff * aff.dX[c]).cwiseProduct(Z_[c] + ad_aff * aff.dZ[c]).sum();
    }
    const Real exponent = std::max<Real>(1.0, 3.0 * std::pow(std::min<Real>(ap_aff, ad_aff), 2));
    Real sigma = std::clamp<Real>(std::pow(std::max<Real>(gap_aff, 0.0) / gap, exponent), 0.0, 1.0);
    // Once complementarity is well below tolerance, stop pushing mu down and
    // spend the steps on the lagging residuals: driving mu further only
    // worsens the conditioning of the Newton system.
    if (gap <= 0.1 * options_.gap_tol * scale) sigma = std::max<Real>(sigma, 0.9);

    // Corrector.
    for (std::size_t c = 0; c < cones_.size(); ++c) {
      if (cones_[c].kind == BlockKind::kPsd) {
        H[c] = sigma * mu * Zinv_[c] - X_[c] - aff.dX[c] * aff.dZ[c] * Zinv_[c];
      } else {
        H[c] = (sigma * mu * Zinv_[c].array() - X_[c].array() -
                aff.dX[c].array() * aff.dZ[c].array() * Zinv_[c].array())
                   .matrix();
      }
    }
    const Direction d = direction(H, Rd, rp, re, M);
    Real ap = std::min<Real>(1.0, gamma * max_step(X_, d.dX));
    Real ad = std::min<Real>(1.0, gamma * max_step(Z_, d.dZ));

    // Backtrack until the Cholesky factorizations succeed.
    std::vector<MatrixXd> Xn(cones_.size());
    std::vector<MatrixXd> Zn(cones_.size());
    for (int tries = 0;; ++tries) {
      for (std::size_t c = 0; c < cones_.size(); ++c) Xn[c] = X_[c] + ap * d.dX[c];
      if (interior(Xn) || tries > 40) break;
      ap *= 0.8;
    }
    for (int tries = 0;; ++tries) {
      for (std::size_t c = 0; c < cones_.size(); ++c) Zn[c] = Z_[c] + ad * d.dZ[c];
      if (interior(Zn) || tries > 40) break;
      ad *= 0.8;
    }
    if (!interior(Xn) || !interior(Zn)) return fail("no interior step", iter);

    // Keep the iterates in a (very) wide neighborhood of the central path so
    // that no eigenvalue pair of XZ collapses far ahead of mu.
    for (int tries = 0; tries < 30 && centrality(Xn, Zn) < kNeighborhood; ++tries) {
      ap *= 0.9;
      ad *= 0.9;
      for (std::size_t c = 0; c < cones_.size(); ++c) {
        Xn[c] = X_[c] + ap * d.dX[c];
        Zn[c] = Z_[c] + ad * d.dZ[c];
      }
    }

    X_ = std::move(Xn);
    Z_ = std::move(Zn);
    y_ += ad * d.dy;
    if (has_free_) xf_ += ap * d.dxf;

    if (options_.verbose) std::fprintf(stderr, "     step  primal %.3Lf  dual %.3Lf  sigma %.2Le\n", ap, ad, sigma);
    stalls = (std::max<Real>(ap, ad) < 1e-9) ? stalls + 1 : 0;
    if (stalls >= 3) return fail("step lengths stalled", iter + 1);
  }
  return finish(SolveStatus::kMaxIter, options_.max_iter, mu);
}

SDPSolution InteriorPoint::finish(SolveStatus status, int iterations, Real mu) const {
  SDPSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.mu_final = static_cast<double>(mu);
  sol.y = y_.cast<double>();
  sol.X.resize(program_.blocks.size());
  sol.Z.resize(program_.blocks.size());
  int cone = 0;
  for (std::size_t b = 0; b < program_.blocks.size(); ++b) {
    const auto& spec = program_.blocks[b];
    if (spec.kind == BlockKind::kZero) {
      sol.X[b] = Eigen::MatrixXd::Zero(spec.size, 1);
      sol.Z[b] = Eigen::MatrixXd::Zero(spec.size, 1);
    } else {
      sol.X[b] = X_.empty() ? Eigen::MatrixXd() : Eigen::MatrixXd(X_[cone].cast<double>());
      sol.Z[b] = Z_.empty() ? Eigen::MatrixXd() : Eigen::MatrixXd(Z_[cone].cast<double>());
      ++cone;
    }
  }
  if (has_free_) {
    const VectorXd zf = cf_ - E_.transpose() * y_;
    for (std::size_t f = 0; f < free_pos_.size(); ++f) {
      const auto [b, i] = free_pos_[f];
      sol.X[b](i, 0) = xf_.size() ? static_cast<double>(xf_(static_cast<Eigen::Index>(f))) : 0.0;
      sol.Z[b](i, 0) = static_cast<double>(zf(static_cast<Eigen::Index>(f)));
    }
  }
  sol.primal_obj = program_.inner(program_.C, sol.X);
  sol.dual_obj = static_cast<double>(b_.dot(y_));
  double gap = 0.0;
  for (std::size_t b = 0; b < sol.X.size(); ++b) gap += sol.X[b].cwiseProduct(sol.Z[b]).sum();
  sol.gap = gap;
  Eigen::VectorXd rp = program_.b;
  for (int k = 0; k < m_; ++k) rp(k) -= program_.inner(program_.A[k], sol.X);
  sol.primal_residual = rp.norm() / (1.0 + program_.b.norm());
  double rd2 = 0.0;
  const BlockMatrix Cd = program_.densify(program_.C);
  BlockMatrix Rd = Cd;
  for (int k = 0; k < m_; ++k) {
    const double yk = sol.y(k);
    if (yk == 0.0) continue;
    for (const auto& e : program_.A[k].entries()) {
      if (program_.blocks[e.block].kind == BlockKind::kPsd) {
        Rd[e.block](e.row, e.col) -= yk * e.value;
        if (e.row != e.col) Rd[e.block](e.col, e.row) -= yk * e.value;
      } else {
        Rd[e.block](e.row, 0) -= yk * e.value;
      }
    }
  }
  for (std::size_t b = 0; b < Rd.size(); ++b) rd2 += (Rd[b] - sol.Z[b]).squaredNorm();
  sol.dual_residual = std::sqrt(rd2) / (1.0 + static_cast<double>(norm_C_));
  return sol;
}

}  // namespace

SDPSolution solve(const ConicProgram& program, const SolveOptions& options) {
  InteriorPoint ip(program, options);
  return ip.run();
}

DualityReport duality_report(const SDPSolution& sol) {
  DualityReport r;
  r.converged = sol.status == SolveStatus::kOptimal;
  r.gap = 0.0;
  r.complementarity = 0.0;
  double comp2 = 0.0;
  for (std::size_t b = 0; b < sol.X.size(); ++b) {
    const auto& X = sol.X[b];
    const auto& Z = sol.Z[b];
    r.gap += X.cwiseProduct(Z).sum();
    if (X.cols() == 1 && X.rows() != 1) {
      comp2 += (2.0 * X.cwiseProduct(Z)).squaredNorm();
    } else {
      comp2 += (X * Z + Z * X).squaredNorm();
    }
  }
  r.complementarity = std::sqrt(comp2);
  r.objective_gap = sol.primal_obj - sol.dual_obj;
  r.primal_residual = sol.primal_residual;
  r.dual_residual = sol.dual_residual;
  r.weak_duality = r.gap >= -1e-8;
  return r;
}

}  // namespace momentlmi
