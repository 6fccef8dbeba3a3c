#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "momentlmi/conic_program.h"

namespace momentlmi {

/// Raised on malformed SDPA input. `line` is 1-based (0 when unknown).
class SdpaParseError : public std::runtime_error {
 public:
  SdpaParseError(const std::string& message, int line);
  int line() const { return line_; }

 private:
  int line_;
};

struct SdpaWriteOptions {
  /// Rewrite each zero block of size s as a diagonal block of size 2s
  /// holding both inequalities, for solvers without free variables.
  bool expand_zero_blocks = false;
  /// Optional comment written at the top of the file.
  std::string comment;
};

/// Writes the program in the sparse SDPA format. The SDPA primal
/// "min c'x s.t. sum F_i x_i - F_0 psd" is our dual form with x = y,
/// c = -b, F_0 = -C and F_i = -A_i, so SDPA objective values are the
/// negatives of ours. Block kinds other than psd/nonneg are recorded in a
/// `*% kinds` comment line that read_sdpa understands.
void write_sdpa(const ConicProgram& program, std::ostream& out, const SdpaWriteOptions& options = {});
std::string to_sdpa(const ConicProgram& program, const SdpaWriteOptions& options = {});

/// Reads the sparse SDPA format (negative block sizes are diagonal blocks).
ConicProgram read_sdpa(std::istream& in);
ConicProgram parse_sdpa(const std::string& text);

}  // namespace momentlmi
