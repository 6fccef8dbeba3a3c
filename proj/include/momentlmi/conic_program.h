#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace momentlmi {

/// Cone of one diagonal block.
///   kPsd:    X, Z positive semidefinite (size x size)
///   kNonneg: X, Z elementwise nonnegative vectors
///   kZero:   Z pinned to 0, X free; carries equality rows of the dual form
enum class BlockKind { kPsd, kNonneg, kZero };

std::string to_string(BlockKind kind);

struct BlockSpec {
  BlockKind kind = BlockKind::kPsd;
  int size = 0;
  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// One entry of a symmetric block-diagonal matrix. For PSD blocks an entry
/// with row < col stands for both (row, col) and (col, row); diagonal kinds
/// only admit row == col. Repeated entries are summed.
struct BlockEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
  friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

/// Sparse symmetric block-diagonal matrix.
class SparseBlockMatrix {
 public:
  /// Adds value at (row, col), normalized to the upper triangle.
  void add(int block, int row, int col, double value);
  const std::vector<BlockEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  /// Sorts by (block, row, col), merges duplicates and drops zeros.
  void compress();

 private:
  std::vector<BlockEntry> entries_;
};

/// Dense block-diagonal matrix. PSD blocks are size x size; diagonal kinds
/// (nonneg, zero) are stored as size x 1 columns.
using BlockMatrix = std::vector<Eigen::MatrixXd>;

/// Standard-form conic program
///   (P)  min <C, X>   s.t. <A_k, X> = b_k (k < m),  X in K
///   (D)  max b'y      s.t. Z = C - sum_k y_k A_k,   Z in K*
/// where K is the product of the blocks' cones (zero blocks: K free, K* = 0).
struct ConicProgram {
  std::vector<BlockSpec> blocks;
  std::vector<SparseBlockMatrix> A;
  Eigen::VectorXd b;
  SparseBlockMatrix C;

  int m() const { return static_cast<int>(A.size()); }
  /// Throws std::invalid_argument on inconsistent structure or non-finite data.
  void validate() const;
  /// Dense block matrix of a sparse one with this program's block layout.
  BlockMatrix densify(const SparseBlockMatrix& s) const;
  /// Sum over blocks of <S, X> where S is sparse.
  double inner(const SparseBlockMatrix& s, const BlockMatrix& x) const;
};

}  // namespace momentlmi
