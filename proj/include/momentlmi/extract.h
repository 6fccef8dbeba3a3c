#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "momentlmi/moments.h"
#include "momentlmi/relaxation.h"

namespace momentlmi {

/// Number of eigenvalues above tol * max(1, lambda_max).
int numerical_rank(const Eigen::MatrixXd& m, double tol);

/// Numerical ranks of M_s(y) for s = 0..r.
std::vector<int> moment_ranks(const MomentVector& y, int r, double tol);

/// rank M_{r - r_X}(y) == rank M_r(y).
bool flat_check(const MomentVector& y, int r, int r_X, double tol = 1e-6);

struct Atom {
  Eigen::VectorXd point;
  double weight = 0.0;
};

class ExtractionFailed : public std::runtime_error {
 public:
  ExtractionFailed(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct ExtractOptions {
  double rank_tol = 1e-6;
  /// Seeds the random combination of multiplication matrices.
  unsigned seed = 0;
  /// Allowed moment mismatch relative to 1 + max |y_alpha|.
  double residual_tol = 1e-6;
  /// Read a rank-one matrix's atom directly off the first-order moments.
  bool rank_one_shortcut = true;
};

/// Atoms x_j and weights w_j with sum_j w_j delta(x_j) reproducing y up to
/// degree 2s, where s <= r is the smallest order with
/// rank M_{s-1}(y) = rank M_s(y). Throws ExtractionFailed if no such s
/// exists or the rebuilt moments miss y by more than residual_tol.
std::vector<Atom> extract_atoms(const MomentVector& y, int r, const ExtractOptions& options = {});

/// Atom of a rank-one moment matrix: first-order moments over the mass.
Atom rank_one_atom(const MomentVector& y);

/// max |y_alpha - sum_j w_j x_j^alpha| over |alpha| <= degree.
double moment_residual(const MomentVector& y, const std::vector<Atom>& atoms, int degree);

struct Certificate {
  int order = 0;
  int r_X = 1;
  double tol = 1e-6;
  /// rank M_s(y*) for s = 0..order.
  std::vector<int> ranks;
  bool flat = false;
  std::vector<Atom> atoms;
  /// Largest violation of the set's constraints at the atoms.
  double residual = 0.0;
  /// Moment mismatch of the atoms against y*.
  double moment_residual = 0.0;
  /// Empty on success; the failure reason when extraction was attempted but
  /// failed.
  std::string extraction_error;
};

/// Ranks, flatness and (when flat) atoms. `set` may be null.
Certificate certify(const MomentVector& y, int r, int r_X, const SemialgebraicSet* set,
                    const ExtractOptions& options = {});

}  // namespace momentlmi
