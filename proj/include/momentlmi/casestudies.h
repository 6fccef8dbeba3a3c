#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "momentlmi/coefficient.h"
#include "momentlmi/conic_program.h"
#include "momentlmi/gmp.h"
#include "momentlmi/polynomial.h"
#include "momentlmi/relaxation.h"
#include "momentlmi/spectra.h"

namespace momentlmi {

/// sup y s.t. [[1, y], [y, 2]] psd. The optimum is sqrt(2).
ConicProgram build_irrat1();
/// sup y over {[[1, y], [y, 2]] psd, [[2y, 2], [2, y]] psd} = {sqrt(2)}.
ConicProgram build_irrat2();

/// [[1, x1, x2], [x1, 1, x3], [x2, x3, 1]].
Pencil build_pillow();
/// diag([[1, 2], [2, y1]], [[1, y1], [y1, y2]], ..., [[1, y_{m-1}],
/// [y_{m-1}, y_m]]); every point has y_m >= 2^(2^m).
Pencil build_exponential(int m);

/// min -x2 over {3 + 2 x2 - x1^2 - x2^2 >= 0, -x1 - x2 - x1 x2 >= 0,
/// 1 + x1 x2 >= 0}.
POPProblem build_polyopt();

/// a_k = 1 / ((2k)^2 - 1).
Coefficient eig_assign_rate(int k);
/// The n x n tridiagonal matrix B with last diagonal entry (n + 1) / n.
std::vector<std::vector<Coefficient>> eig_assign_matrix(int n);
/// p_k(x) = e_k(B^-1 diag x) - e_k(a_1, ..., a_n), k = 1..n, where e_k is
/// the k-th elementary symmetric function (of the eigenvalues on the left).
/// p_k has degree k; its coefficients are sums of principal minors of B^-1.
std::vector<Polynomial> eig_assign_system(int n);
/// min sum_{i,j} (x_i - x_j)^2 s.t. p_k(x) = 0, inside the ball
/// sum x_i^2 <= 1. Requires 2 <= n <= 8.
POPProblem build_eig_assign(int n);

/// x' = u from x = 1 to x = 0 with running cost x^2 + u^2 and free
/// horizon: one occupation measure over (x, u), unconstrained support.
GMPProblem build_lqr();
/// x' = -x from X_0 = [1, 2] to X_T = [-1/2, 1/2] inside X = [-2, 2],
/// minimizing <x^2, mu> with mu_0 a probability measure. Ties are broken
/// toward the least occupation mass (see GMPProblem::tie_break).
GMPProblem build_occtraj();
/// Relaxed Bolza problem: x' = u on [0, 1] from x = 0 to x = 0 with cost
/// x^4 + (u^2 - 1)^2, u^2 <= 1, x^2 <= 1.
GMPProblem build_bolza();

/// Double integrator theta'' = u / I under u = L sat(-(kp theta + kd omega)
/// / L), split into the linear, upper and lower saturation cells.
struct SaturationSpec {
  double inertia = 1.0;
  double kp = 1.0;
  double kd = 2.0;
  double limit = 0.5;
  /// Total time; the occupation masses add up to it.
  double horizon = 4.0;
  /// Fixed initial state; when empty, the initial measure is a probability
  /// measure on the box |theta| <= theta_max, |omega| <= omega_max.
  std::optional<Eigen::Vector2d> x0 = Eigen::Vector2d(1.5, 0.0);
  double theta_max = 1.0;
  double omega_max = 1.0;
  /// Squared radius of the ball holding the cells.
  double radius2 = 4.0;
  /// Squared radius of the ball holding the terminal state.
  double terminal_radius2 = 4.0;

  /// The launcher constants of the control-law validation study. Not a
  /// desk-scale problem; no masses are asserted for it.
  static SaturationSpec Launcher();
};

/// Cell measures "linear", "upper", "lower" over (t, theta, omega) with
/// t in [0, horizon], an optional "mu0" and "muT" over (theta, omega).
/// Maximizes <theta^2 + omega^2, muT> subject to the piecewise Liouville
/// equation; testing with v = t makes the cell masses add up to the
/// horizon.
GMPProblem build_saturation_cells(const SaturationSpec& spec = {});

}  // namespace momentlmi
