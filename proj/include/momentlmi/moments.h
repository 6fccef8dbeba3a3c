#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "momentlmi/polynomial.h"

namespace momentlmi {

/// Raised when a computation needs a moment beyond the stored degree.
struct MissingMomentError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Truncated moment sequence y_alpha, |alpha| <= degree, stored in grlex
/// order. Entry 0 is the mass.
class MomentVector {
 public:
  MomentVector(int nvars, int degree);
  MomentVector(int nvars, int degree, Eigen::VectorXd values);

  /// Moments of sum_k weights[k] * delta(points[k]).
  static MomentVector FromAtoms(int nvars, int degree, const std::vector<Eigen::VectorXd>& points,
                                const std::vector<double>& weights);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  double mass() const { return values_(0); }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }

  double at(const Exponent& alpha) const;
  double operator[](std::size_t k) const { return values_(static_cast<Eigen::Index>(k)); }
  double& operator[](std::size_t k) { return values_(static_cast<Eigen::Index>(k)); }

  MomentVector truncated(int degree) const;

 private:
  int nvars_;
  int degree_;
  Eigen::VectorXd values_;
};

/// sum_alpha p_alpha y_alpha.
double riesz_apply(const Polynomial& p, const MomentVector& y);

struct StencilTerm {
  Exponent exponent;
  std::size_t index;  // grlex_index(exponent)
  Coefficient coefficient;
};

/// Symbolic symmetric matrix whose cells are linear functionals of a moment
/// vector. Only the upper triangle is stored; cell(i, j) == cell(j, i).
class MatrixStencil {
 public:
  /// Moment matrix M_d(y): cell (i, j) is y_{e_i + e_j}.
  static MatrixStencil Moment(int nvars, int d);
  /// Localizing matrix M_d(q y): cell (i, j) is sum_g q_g y_{e_i + e_j + g}.
  static MatrixStencil Localizing(const Polynomial& q, int d);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int side() const { return side_; }
  /// Largest moment degree referenced by any cell.
  int max_degree() const { return max_degree_; }
  const std::vector<StencilTerm>& cell(int i, int j) const;

 private:
  MatrixStencil(int nvars, int order, int side);

  int nvars_;
  int order_;
  int side_;
  int max_degree_ = 0;
  std::vector<std::vector<StencilTerm>> upper_;  // row-major upper triangle
};

/// Numeric matrix of the stencil at y.
Eigen::MatrixXd evaluate_stencil(const MatrixStencil& s, const MomentVector& y);

}  // namespace momentlmi
