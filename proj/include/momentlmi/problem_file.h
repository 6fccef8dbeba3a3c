#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "momentlmi/conic_program.h"
#include "momentlmi/gmp.h"
#include "momentlmi/relaxation.h"
#include "momentlmi/spectra.h"

namespace momentlmi {

/// Problem files are line-oriented text. `#` starts a comment. Top-level
/// `key = value` lines (kind, name, order, and for gmp also sense, offset
/// and slack) come first, followed by `[section]` blocks:
///
///   pop:    [variables] names; [objective] p0; [inequalities] and
///           [equalities] one polynomial per line; [ball] R.
///   gmp:    [measure NAME] with `variables =`, `support =` (>= 0) and
///           `equality =` lines; [constraints] one `label: <p, mu> + ... = b`
///           per line (also <= and >=); [objective] and [tie_break] term
///           sums; [liouville] with `initial =` / `terminal =` either
///           `measure NAME` or `point v1 v2 ...`, then one `cell = NAME`
///           per cell followed by time, states, controls, f (one line per
///           state), lagrangian, terminal_cost and horizon.
///   sdp:    [sdpa] the program in sparse SDPA format.
///   pencil: [variables] names; [matrix] rows of comma-separated affine
///           entries; [points] optional query points, one per line.
enum class ProblemKind { kPop, kGmp, kSdp, kPencil };

std::string to_string(ProblemKind kind);

struct ProblemFile {
  ProblemKind kind = ProblemKind::kPop;
  std::string name;
  /// Relaxation order suggested by the file; the CLI's --order wins.
  std::optional<int> order;

  POPProblem pop;
  GMPProblem gmp;
  ConicProgram sdp;
  std::optional<Pencil> pencil;
  VarSpace pencil_space;
  std::vector<Eigen::VectorXd> points;
};

/// Raised on malformed problem files. Line and column are 1-based.
class ProblemParseError : public std::runtime_error {
 public:
  ProblemParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

ProblemFile parse_problem(std::string_view text);
/// Reads and parses a file; I/O failures raise std::runtime_error.
ProblemFile read_problem_file(const std::string& path);
/// Canonical text for the problem. parse_problem(print_problem(p)) prints
/// back to the same text.
std::string print_problem(const ProblemFile& p);

}  // namespace momentlmi
