#include "momentlmi/sdpa_io.h"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace momentlmi {

SdpaParseError::SdpaParseError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::istream& in, std::vector<BlockKind>* kinds) {
  std::vector<Token> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("*% kinds", 0) == 0) {
      std::istringstream ks(line.substr(8));
      std::string k;
      while (ks >> k) {
        if (k == "psd") {
          kinds->push_back(BlockKind::kPsd);
        } else if (k == "nonneg") {
          kinds->push_back(BlockKind::kNonneg);
        } else if (k == "zero") {
          kinds->push_back(BlockKind::kZero);
        } else {
          throw SdpaParseError("unknown block kind '" + k + "'", lineno);
        }
      }
      continue;
    }
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
    for (char& c : line) {
      if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
    }
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) tokens.push_back({t, lineno});
  }
  return tokens;
}

class Cursor {
 public:
  explicit Cursor(const std::vector<Token>& tokens) : tokens_(tokens) {}
  bool done() const { return pos_ >= tokens_.size(); }
  int line() const { return done() ? (tokens_.empty() ? 0 : tokens_.back().line) : tokens_[pos_].line; }

  double real(const char* what) {
    if (done()) throw SdpaParseError(std::string("unexpected end of input, expected ") + what, line());
    const Token& t = tokens_[pos_++];
    try {
      std::size_t used = 0;
      const double v = std::stod(t.text, &used);
      if (used != t.text.size()) throw std::invalid_argument(t.text);
      return v;
    } catch (const std::exception&) {
      throw SdpaParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.line);
    }
  }

  // Header lines may carry trailing annotations such as "=mDIM".
  void skip_rest_of_line(int line) {
    while (!done() && tokens_[pos_].line == line) ++pos_;
  }

  long integer(const char* what) {
    const int ln = line();
    const double v = real(what);
    if (v != static_cast<double>(static_cast<long>(v)))
      throw SdpaParseError(std::string("expected integer ") + what, ln);
    return static_cast<long>(v);
  }

 private:
  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_sdpa(const ConicProgram& program, std::ostream& out, const SdpaWriteOptions& options) {
  program.validate();
  // Output block layout: each input block maps to one output block.
  std::vector<int> sizes;
  bool any_zero = false;
  for (const auto& spec : program.blocks) {
    if (spec.kind == BlockKind::kPsd) {
      sizes.push_back(spec.size);
    } else if (spec.kind == BlockKind::kNonneg) {
      sizes.push_back(-spec.size);
    } else {
      any_zero = true;
      sizes.push_back(options.expand_zero_blocks ? -2 * spec.size : -spec.size);
    }
  }
  if (!options.comment.empty()) {
    std::istringstream cs(options.comment);
    std::string l;
    while (std::getline(cs, l)) out << "* " << l << "\n";
  }
  if (any_zero && !options.expand_zero_blocks) {
    out << "*% kinds";
    for (const auto& spec : program.blocks) out << " " << to_string(spec.kind);
    out << "\n";
  }
  out << program.m() << "\n" << program.blocks.size() << "\n";
  for (std::size_t i = 0; i < sizes.size(); ++i) out << (i ? " " : "") << sizes[i];
  out << "\n";
  for (int k = 0; k < program.m(); ++k) out << (k ? " " : "") << number(-program.b(k));
  out << "\n";

  auto emit = [&](int mat, const SparseBlockMatrix& s) {
    SparseBlockMatrix c = s;
    c.compress();
    for (const auto& e : c.entries()) {
      const auto& spec = program.blocks[e.block];
      const double v = -e.value;
      out << mat << " " << e.block + 1 << " " << e.row + 1 << " " << e.col + 1 << " " << number(v) << "\n";
      if (spec.kind == BlockKind::kZero && options.expand_zero_blocks) {
        const int r = e.row + spec.size + 1;
        out << mat << " " << e.block + 1 << " " << r << " " << r << " " << number(-v) << "\n";
      }
    }
  };
  emit(0, program.C);
  for (int k = 0; k < program.m(); ++k) emit(k + 1, program.A[k]);
}

std::string to_sdpa(const ConicProgram& program, const SdpaWriteOptions& options) {
  std::ostringstream os;
  write_sdpa(program, os, options);
  return os.str();
}

ConicProgram read_sdpa(std::istream& in) {
  std::vector<BlockKind> kinds;
  const auto tokens = tokenize(in, &kinds);
  Cursor cur(tokens);
  const int mline = cur.line();
  const long m = cur.integer("constraint count");
  cur.skip_rest_of_line(mline);
  const int nline = cur.line();
  const long nb = cur.integer("block count");
  cur.skip_rest_of_line(nline);
  if (m < 0) throw SdpaParseError("negative constraint count", 1);
  if (nb <= 0) throw SdpaParseError("block count must be positive", nline);
  if (!kinds.empty() && static_cast<long>(kinds.size()) != nb)
    throw SdpaParseError("kinds comment lists " + std::to_string(kinds.size()) + " blocks, expected " +
                             std::to_string(nb),
                         0);
  ConicProgram p;
  for (long i = 0; i < nb; ++i) {
    const int ln = cur.line();
    const long s = cur.integer("block size");
    if (s == 0) throw SdpaParseError("block size 0", ln);
    BlockKind kind = s > 0 ? BlockKind::kPsd : BlockKind::kNonneg;
    if (!kinds.empty()) {
      if ((kinds[i] == BlockKind::kPsd) != (s > 0))
        throw SdpaParseError("block " + std::to_string(i + 1) + " size sign contradicts its kind", ln);
      kind = kinds[i];
    }
    p.blocks.push_back({kind, static_cast<int>(s > 0 ? s : -s)});
    if (i + 1 == nb) cur.skip_rest_of_line(ln);
  }
  p.b = Eigen::VectorXd(m);
  int cline = cur.line();
  for (long k = 0; k < m; ++k) {
    cline = cur.line();
    p.b(k) = -cur.real("objective coefficient");
  }
  if (m > 0) cur.skip_rest_of_line(cline);
  p.A.resize(m);
  while (!cur.done()) {
    const int ln = cur.line();
    const long mat = cur.integer("matrix index");
    const long blk = cur.integer("block index");
    const long i = cur.integer("row");
    const long j = cur.integer("column");
    const double v = cur.real("value");
    if (mat < 0 || mat > m) throw SdpaParseError("matrix index " + std::to_string(mat) + " out of range", ln);
    if (blk < 1 || blk > nb) throw SdpaParseError("block index " + std::to_string(blk) + " out of range", ln);
    const auto& spec = p.blocks[blk - 1];
    if (i < 1 || j < 1 || i > spec.size || j > spec.size)
      throw SdpaParseError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside block", ln);
    if (spec.kind != BlockKind::kPsd && i != j) throw SdpaParseError("off-diagonal entry in diagonal block", ln);
    SparseBlockMatrix& target = mat == 0 ? p.C : p.A[mat - 1];
    target.add(static_cast<int>(blk - 1), static_cast<int>(i - 1), static_cast<int>(j - 1), -v);
  }
  p.C.compress();
  for (auto& a : p.A) a.compress();
  return p;
}

ConicProgram parse_sdpa(const std::string& text) {
  std::istringstream is(text);
  return read_sdpa(is);
}

}  // namespace momentlmi
