#include "momentlmi/moments.h"

#include <algorithm>
#include <cmath>

namespace momentlmi {

MomentVector::MomentVector(int nvars, int degree)
    : nvars_(nvars),
      degree_(degree),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(monomial_count(nvars, degree)))) {}

MomentVector::MomentVector(int nvars, int degree, Eigen::VectorXd values)
    : nvars_(nvars), degree_(degree), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != monomial_count(nvars, degree)) {
    throw std::invalid_argument("moment vector length " + std::to_string(values_.size()) +
                                " does not match C(n+d, n) = " +
                                std::to_string(monomial_count(nvars, degree)));
  }
}

MomentVector MomentVector::FromAtoms(int nvars, int degree, const std::vector<Eigen::VectorXd>& points,
                                     const std::vector<double>& weights) {
  if (points.size() != weights.size()) throw std::invalid_argument("points/weights size mismatch");
  MomentVector y(nvars, degree);
  const auto monos = monomials_up_to(nvars, degree);
  for (std::size_t a = 0; a < points.size(); ++a) {
    if (points[a].size() != nvars) throw std::invalid_argument("atom dimension mismatch");
    for (std::size_t k = 0; k < monos.size(); ++k) {
      double m = weights[a];
      for (int i = 0; i < nvars; ++i) m *= std::pow(points[a](i), monos[k][i]);
      y[k] += m;
    }
  }
  return y;
}

double MomentVector::at(const Exponent& alpha) const {
  if (alpha.nvars() != nvars_) throw std::invalid_argument("exponent length mismatch");
  if (alpha.degree() > degree_) {
    throw MissingMomentError("moment y" + alpha.to_string() + " exceeds stored degree " +
                             std::to_string(degree_));
  }
  return values_(static_cast<Eigen::Index>(grlex_index(alpha)));
}

MomentVector MomentVector::truncated(int degree) const {
  if (degree > degree_) throw MissingMomentError("cannot extend a moment vector by truncation");
  return MomentVector(nvars_, degree,
                      values_.head(static_cast<Eigen::Index>(monomial_count(nvars_, degree))));
}

double riesz_apply(const Polynomial& p, const MomentVector& y) {
  if (p.nvars() != y.nvars()) throw std::invalid_argument("riesz_apply: variable count mismatch");
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) sum += c.to_double() * y.at(e);
  return sum;
}

MatrixStencil::MatrixStencil(int nvars, int order, int side)
    : nvars_(nvars), order_(order), side_(side) {
  upper_.resize(static_cast<std::size_t>(side) * (side + 1) / 2);
}

const std::vector<StencilTerm>& MatrixStencil::cell(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= side_) throw std::out_of_range("stencil cell out of range");
  // Row i of the upper triangle starts after i rows of decreasing length.
  const std::size_t offset = static_cast<std::size_t>(i) * side_ - static_cast<std::size_t>(i) * (i - 1) / 2;
  return upper_[offset + (j - i)];
}

MatrixStencil MatrixStencil::Moment(int nvars, int d) {
  return Localizing(Polynomial(nvars, 1), d);
}

MatrixStencil MatrixStencil::Localizing(const Polynomial& q, int d) {
  const int n = q.nvars();
  const auto basis = monomials_up_to(n, d);
  MatrixStencil s(n, d, static_cast<int>(basis.size()));
  std::size_t slot = 0;
  for (int i = 0; i < s.side_; ++i) {
    for (int j = i; j < s.side_; ++j, ++slot) {
      const Exponent base = basis[i] + basis[j];
      auto& terms = s.upper_[slot];
      for (const auto& [g, c] : q.terms()) {
        Exponent e = base + g;
        s.max_degree_ = std::max(s.max_degree_, e.degree());
        const std::size_t idx = grlex_index(e);
        terms.push_back(StencilTerm{std::move(e), idx, c});
      }
    }
  }
  return s;
}

Eigen::MatrixXd evaluate_stencil(const MatrixStencil& s, const MomentVector& y) {
  if (s.nvars() != y.nvars()) throw std::invalid_argument("evaluate_stencil: variable count mismatch");
  if (s.max_degree() > y.degree()) {
    throw MissingMomentError("stencil needs moments of degree " + std::to_string(s.max_degree()) +
                             " but y stops at " + std::to_string(y.degree()));
  }
  Eigen::MatrixXd m(s.side(), s.side());
  for (int i = 0; i < s.side(); ++i) {
    for (int j = i; j < s.side(); ++j) {
      double v = 0.0;
      for (const auto& t : s.cell(i, j)) v += t.coefficient.to_double() * y[t.index];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

}  // namespace momentlmi
