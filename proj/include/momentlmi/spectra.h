#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

#include "momentlmi/coefficient.h"
#include "momentlmi/polynomial.h"
#include "momentlmi/relaxation.h"
#include "momentlmi/sdp_solver.h"

namespace momentlmi {

/// Affine symmetric pencil F(x) = F_0 + sum_k x_k F_k with exact
/// coefficients. F[k] is stored row-major with m * m entries.
class Pencil {
 public:
  Pencil(int n, int m);

  /// Each double is converted to the rational it represents exactly.
  static Pencil FromMatrices(const std::vector<Eigen::MatrixXd>& F);
  /// diag(P_1, ..., P_k) over a shared variable space.
  static Pencil BlockDiagonal(const std::vector<Pencil>& blocks);

  int n() const { return n_; }
  int m() const { return m_; }

  const Coefficient& coefficient(int k, int i, int j) const { return F_[k][i * m_ + j]; }
  /// Sets F_k(i, j) and F_k(j, i).
  void set(int k, int i, int j, const Coefficient& c);

  /// F(x) in floating point.
  Eigen::MatrixXd evaluate(std::span<const double> x) const;
  /// The entry F(x)_{ij} as an affine polynomial in n variables.
  Polynomial entry(int i, int j) const;

 private:
  int n_;
  int m_;
  std::vector<std::vector<Coefficient>> F_;
};

/// Largest side for which defining_polynomials expands minors.
inline constexpr int kMaxDefiningSide = 8;

/// f_k(x) = sum of the k x k principal minors of F(x), for k = 1..m, read
/// off det(t I + F(x)) = sum_k f_{m-k}(x) t^k. Exact when the pencil is.
/// Throws std::invalid_argument when m > kMaxDefiningSide.
std::vector<Polynomial> defining_polynomials(const Pencil& p);

/// lambda_min(F(x)) >= -tol.
bool membership(const Pencil& p, std::span<const double> x, double tol = 1e-9);

/// k unit vectors at angles 2 pi j / k, starting from (1, 0).
std::vector<Eigen::Vector2d> evenly_spaced_directions(int k);

struct ShadowPoint {
  Eigen::Vector2d direction;
  /// Projected first-order moments of the maximizer.
  Eigen::Vector2d point;
  /// max c' (y_{e_i}, y_{e_j}) over the order-r relaxation.
  double value = 0.0;
  SolveStatus status = SolveStatus::kNumericalFailure;
};

struct ShadowOptions {
  SolveOptions solver;
  /// Worker threads for the per-direction solves; 0 picks the hardware
  /// concurrency.
  int threads = 1;
};

/// Support points of the order-r shadow X_r of the set, projected on the
/// coordinates `projection`. Each direction c gives the halfspace
/// c' z <= value containing the projection of the set. Results follow the
/// order of `directions`. Throws OrderError below the set's order.
std::vector<ShadowPoint> shadow_support_points(const SemialgebraicSet& set, int r,
                                               const std::vector<Eigen::Vector2d>& directions,
                                               std::pair<int, int> projection, const ShadowOptions& options = {});

}  // namespace momentlmi
