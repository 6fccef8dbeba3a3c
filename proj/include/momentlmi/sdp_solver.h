#pragma once

#include <Eigen/Dense>

#include <string>

#include "momentlmi/conic_program.h"

namespace momentlmi {

struct SolveOptions {
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iter = 200;
  double step_fraction = 0.98;
  bool verbose = false;

  /// Throws std::invalid_argument unless all fields are positive and
  /// step_fraction < 1.
  void validate() const;
};

/// Outcome of a solve. Infeasible and unbounded refer to the dual form (D),
/// which is the form moment relaxations are written in: kInfeasible means no
/// y satisfies the constraints, kUnbounded means b'y is unbounded above.
/// Both are detected heuristically (divergence of the opposite objective
/// while its residual stays small).
enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIter, kNumericalFailure };

std::string to_string(SolveStatus status);

struct SDPSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  BlockMatrix X;
  Eigen::VectorXd y;
  BlockMatrix Z;
  double primal_obj = 0.0;  // <C, X>
  double dual_obj = 0.0;    // b'y
  double gap = 0.0;         // <X, Z>
  double primal_residual = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual_residual = 0.0;    // ||C - Z - A*y|| / (1 + ||C||)
  int iterations = 0;
  double mu_final = 0.0;
};

/// Infeasible-start primal-dual path following with the HKM direction and a
/// Mehrotra predictor-corrector. Zero blocks are handled by restricting y to
/// the affine set they define, so their rows enter the Newton system exactly.
SDPSolution solve(const ConicProgram& program, const SolveOptions& options = {});

struct DualityReport {
  bool converged = false;        // status == optimal
  double gap = 0.0;              // <X, Z>
  double objective_gap = 0.0;    // <C, X> - b'y
  double complementarity = 0.0;  // ||XZ + ZX||_F over PSD blocks, |2 x z| on diagonal blocks
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool weak_duality = false;     // gap >= -1e-8
};

DualityReport duality_report(const SDPSolution& solution);

struct PsdCheck {
  double min_eig = 0.0;
  bool is_psd = false;
};

/// Smallest eigenvalue of a symmetric matrix and whether it is >= -tol.
PsdCheck psd_project_check(const Eigen::MatrixXd& m, double tol);

}  // namespace momentlmi
