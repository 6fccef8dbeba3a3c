#include "momentlmi/conic_program.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace momentlmi {

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::kPsd:
      return "psd";
    case BlockKind::kNonneg:
      return "nonneg";
    case BlockKind::kZero:
      return "zero";
  }
  return "?";
}

void SparseBlockMatrix::add(int block, int row, int col, double value) {
  if (row > col) std::swap(row, col);
  entries_.push_back(BlockEntry{block, row, col, value});
}

void SparseBlockMatrix::compress() {
  std::sort(entries_.begin(), entries_.end(), [](const BlockEntry& a, const BlockEntry& b) {
    if (a.block != b.block) return a.block < b.block;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  std::vector<BlockEntry> merged;
  for (const auto& e : entries_) {
    if (!merged.empty() && merged.back().block == e.block && merged.back().row == e.row &&
        merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const BlockEntry& e) { return e.value == 0.0; });
  entries_ = std::move(merged);
}

namespace {

void check_entries(const SparseBlockMatrix& s, const std::vector<BlockSpec>& blocks,
                   const std::string& what) {
  for (const auto& e : s.entries()) {
    if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
      throw std::invalid_argument(what + ": block index " + std::to_string(e.block) + " out of range");
    const auto& spec = blocks[e.block];
    if (e.row < 0 || e.col >= spec.size)
      throw std::invalid_argument(what + ": entry outside block " + std::to_string(e.block));
    if (spec.kind != BlockKind::kPsd && e.row != e.col)
      throw std::invalid_argument(what + ": off-diagonal entry in " + to_string(spec.kind) + " block");
    if (!std::isfinite(e.value)) throw std::invalid_argument(what + ": non-finite entry");
  }
}

}  // namespace

void ConicProgram::validate() const {
  for (const auto& spec : blocks) {
    if (spec.size <= 0) throw std::invalid_argument("block sizes must be positive");
  }
  if (b.size() != m()) {
    throw std::invalid_argument("b has length " + std::to_string(b.size()) + " but there are " +
                                std::to_string(m()) + " constraint matrices");
  }
  if (!b.allFinite()) throw std::invalid_argument("b has non-finite entries");
  check_entries(C, blocks, "C");
  for (int k = 0; k < m(); ++k) check_entries(A[k], blocks, "A_" + std::to_string(k + 1));
}

BlockMatrix ConicProgram::densify(const SparseBlockMatrix& s) const {
  BlockMatrix out;
  out.reserve(blocks.size());
  for (const auto& spec : blocks) {
    out.push_back(spec.kind == BlockKind::kPsd ? Eigen::MatrixXd::Zero(spec.size, spec.size)
                                               : Eigen::MatrixXd::Zero(spec.size, 1));
  }
  for (const auto& e : s.entries()) {
    if (blocks[e.block].kind == BlockKind::kPsd) {
      out[e.block](e.row, e.col) += e.value;
      if (e.row != e.col) out[e.block](e.col, e.row) += e.value;
    } else {
      out[e.block](e.row, 0) += e.value;
    }
  }
  return out;
}

double ConicProgram::inner(const SparseBlockMatrix& s, const BlockMatrix& x) const {
  double sum = 0.0;
  for (const auto& e : s.entries()) {
    if (blocks[e.block].kind == BlockKind::kPsd) {
      sum += e.value * x[e.block](e.row, e.col);
      if (e.row != e.col) sum += e.value * x[e.block](e.col, e.row);
    } else {
      sum += e.value * x[e.block](e.row, 0);
    }
  }
  return sum;
}

}  // namespace momentlmi
