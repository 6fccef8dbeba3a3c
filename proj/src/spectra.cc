#include "momentlmi/spectra.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace momentlmi {

Pencil::Pencil(int n, int m) : n_(n), m_(m), F_(n + 1, std::vector<Coefficient>(m * m)) {
  if (n < 0 || m < 1) throw std::invalid_argument("pencil needs n >= 0 and m >= 1");
}

Pencil Pencil::FromMatrices(const std::vector<Eigen::MatrixXd>& F) {
  if (F.empty()) throw std::invalid_argument("pencil needs F_0");
  const int m = static_cast<int>(F[0].rows());
  Pencil p(static_cast<int>(F.size()) - 1, m);
  for (int k = 0; k < static_cast<int>(F.size()); ++k) {
    if (F[k].rows() != m || F[k].cols() != m) throw std::invalid_argument("pencil matrices differ in size");
    if ((F[k] - F[k].transpose()).cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("pencil matrix F_" + std::to_string(k) + " is not symmetric");
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) p.set(k, i, j, Coefficient(mpq_class(F[k](i, j))));
  }
  return p;
}

Pencil Pencil::BlockDiagonal(const std::vector<Pencil>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("no blocks");
  int m = 0;
  for (const auto& b : blocks) {
    if (b.n() != blocks[0].n()) throw std::invalid_argument("blocks have different variable counts");
    m += b.m();
  }
  Pencil p(blocks[0].n(), m);
  int at = 0;
  for (const auto& b : blocks) {
    for (int k = 0; k <= b.n(); ++k)
      for (int i = 0; i < b.m(); ++i)
        for (int j = i; j < b.m(); ++j) p.set(k, at + i, at + j, b.coefficient(k, i, j));
    at += b.m();
  }
  return p;
}

void Pencil::set(int k, int i, int j, const Coefficient& c) {
  F_.at(k).at(i * m_ + j) = c;
  F_[k].at(j * m_ + i) = c;
}

Eigen::MatrixXd Pencil::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("point has the wrong dimension");
  Eigen::MatrixXd out(m_, m_);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      double v = coefficient(0, i, j).to_double();
      for (int k = 0; k < n_; ++k) v += x[k] * coefficient(k + 1, i, j).to_double();
      out(i, j) = v;
    }
  }
  return out;
}

Polynomial Pencil::entry(int i, int j) const {
  Polynomial p(n_, coefficient(0, i, j));
  for (int k = 0; k < n_; ++k) p += Polynomial::Variable(n_, k) * coefficient(k + 1, i, j);
  return p;
}

std::vector<Polynomial> defining_polynomials(const Pencil& p) {
  const int m = p.m();
  const int n = p.n();
  if (m > kMaxDefiningSide) {
    throw std::invalid_argument("defining polynomials are limited to side " + std::to_string(kMaxDefiningSide) +
                                ", got " + std::to_string(m));
  }
  // det(t I + F(x)) over the variables (x, t) by Laplace expansion along
  // the rows, memoized on the set of columns already used.
  const int nt = n + 1;
  std::vector<int> lift(n);
  for (int k = 0; k < n; ++k) lift[k] = k;
  std::vector<std::vector<Polynomial>> G(m, std::vector<Polynomial>(m, Polynomial(nt)));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      G[i][j] = p.entry(i, j).remap(lift, nt);
      if (i == j) G[i][j] += Polynomial::Variable(nt, n);
    }
  }
  // minor[mask] = determinant of rows 0..|mask|-1 against the columns in mask.
  std::vector<Polynomial> minor(std::size_t{1} << m, Polynomial(nt));
  minor[0] = Polynomial(nt, Coefficient(1));
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    const int row = std::popcount(mask) - 1;
    Polynomial acc(nt);
    // Expansion along the last row; a column's sign follows its position
    // within the subset.
    int position = 0;
    for (int col = 0; col < m; ++col) {
      if (!(mask & (1u << col))) continue;
      const unsigned rest = mask & ~(1u << col);
      const Polynomial term = G[row][col] * minor[rest];
      if ((row + position) % 2 == 0) {
        acc += term;
      } else {
        acc -= term;
      }
      ++position;
    }
    minor[mask] = std::move(acc);
  }
  const Polynomial& det = minor[(1u << m) - 1];

  std::vector<Polynomial> f(m, Polynomial(n));
  for (const auto& [e, c] : det.terms()) {
    const int tpow = e[n];
    if (tpow == m) continue;
    std::vector<int> powers(e.powers().begin(), e.powers().begin() + n);
    f[m - tpow - 1].add_term(Exponent(std::move(powers)), c);
  }
  return f;
}

bool membership(const Pencil& p, std::span<const double> x, double tol) {
  const Eigen::MatrixXd F = p.evaluate(x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= -tol;
}

std::vector<Eigen::Vector2d> evenly_spaced_directions(int k) {
  if (k < 1) throw std::invalid_argument("need at least one direction");
  std::vector<Eigen::Vector2d> out;
  for (int j = 0; j < k; ++j) {
    const double a = 2.0 * std::numbers::pi * j / k;
    out.emplace_back(std::cos(a), std::sin(a));
  }
  return out;
}

std::vector<ShadowPoint> shadow_support_points(const SemialgebraicSet& set, int r,
                                               const std::vector<Eigen::Vector2d>& directions,
                                               std::pair<int, int> projection, const ShadowOptions& options) {
  const int n = set.space.size();
  const auto [pi, pj] = projection;
  if (pi < 0 || pj < 0 || pi >= n || pj >= n || pi == pj)
    throw std::invalid_argument("projection indices must be two distinct variables");
  const int r_X = set_order(set);
  if (r < r_X) throw OrderError("order " + std::to_string(r) + " is below r_X = " + std::to_string(r_X), r_X);

  std::vector<ShadowPoint> out(directions.size());
  auto run = [&](std::size_t d) {
    const Eigen::Vector2d& c = directions[d];
    POPProblem pop;
    pop.feasible_set = set;
    pop.objective = Polynomial::Variable(n, pi) * Coefficient(mpq_class(-c(0))) +
                    Polynomial::Variable(n, pj) * Coefficient(mpq_class(-c(1)));
    const auto res = bound_and_moments(pop, r, options.solver);
    ShadowPoint& s = out[d];
    s.direction = c;
    s.status = res.status;
    s.value = -res.bound;
    s.point = Eigen::Vector2d(res.moments.at(Exponent::Unit(n, pi)), res.moments.at(Exponent::Unit(n, pj)));
  };

  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(directions.size(), 1)));
  if (threads == 1) {
    for (std::size_t d = 0; d < directions.size(); ++d) run(d);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t d = next++; d < directions.size(); d = next++) run(d);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace momentlmi
