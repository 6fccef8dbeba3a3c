#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "momentlmi/coefficient.h"

namespace momentlmi {

/// Exponent tuple alpha in N^n of the monomial x^alpha.
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(std::vector<int> powers);

  static Exponent Zero(int nvars) { return Exponent(std::vector<int>(nvars, 0)); }
  static Exponent Unit(int nvars, int i);

  int nvars() const { return static_cast<int>(powers_.size()); }
  int degree() const;
  int operator[](int i) const { return powers_[i]; }
  const std::vector<int>& powers() const { return powers_; }

  Exponent operator+(const Exponent& o) const;
  friend bool operator==(const Exponent&, const Exponent&) = default;

  /// "(1,0,2)".
  std::string to_string() const;

 private:
  std::vector<int> powers_;
};

/// Strict weak order: graded, then lexicographic with x1 heaviest, i.e. for
/// n = 2 the sequence 1, x1, x2, x1^2, x1 x2, x2^2, ...
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

/// C(n + d, n); throws std::overflow_error rather than wrapping.
std::size_t monomial_count(int n, int d);

/// Position of e in the graded lexicographic enumeration of N^n.
std::size_t grlex_index(const Exponent& e);

/// Inverse of grlex_index.
Exponent grlex_exponent(int n, std::size_t k);

/// All exponents of degree <= d in grlex order.
std::vector<Exponent> monomials_up_to(int n, int d);

/// Ordered, duplicate-free list of variable names.
class VarSpace {
 public:
  VarSpace() = default;
  explicit VarSpace(std::vector<std::string> names);

  /// x1, ..., xn.
  static VarSpace Numbered(int n, const std::string& prefix = "x");

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int i) const { return names_[i]; }
  std::optional<int> index_of(std::string_view name) const;

  friend bool operator==(const VarSpace&, const VarSpace&) = default;

 private:
  std::vector<std::string> names_;
};

/// Sparse multivariate polynomial with terms kept in grlex order. Zero
/// coefficients are never stored; the zero polynomial has degree 0.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Coefficient, GrlexLess>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}
  Polynomial(int nvars, const Coefficient& constant);

  static Polynomial Monomial(const Exponent& e, const Coefficient& c = 1);
  static Polynomial Variable(int nvars, int i);

  int nvars() const { return nvars_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_exact() const;
  const Terms& terms() const { return terms_; }
  Coefficient coefficient(const Exponent& e) const;
  /// Highest power of variable i appearing in any term.
  int degree_in(int i) const;

  /// Accumulates c x^e, dropping the term if it cancels.
  void add_term(const Exponent& e, const Coefficient& c);

  double evaluate(std::span<const double> x) const;
  Coefficient evaluate_exact(std::span<const Coefficient> x) const;

  Polynomial partial(int i) const;
  Polynomial pow(int k) const;
  /// Replaces variable i by the constant value; nvars is unchanged.
  Polynomial substitute(int i, const Coefficient& value) const;
  /// Replaces x_i by factor * x_i.
  Polynomial scale_variable(int i, const Coefficient& factor) const;
  /// Moves variable i to slot target[i] of an nvars-dimensional space. A
  /// target of -1 drops the variable, which must then not occur.
  Polynomial remap(std::span<const int> target, int nvars) const;
  /// Same polynomial with float coefficients.
  Polynomial to_float() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const Coefficient& c);
  Polynomial operator-() const;

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Coefficient& c) { return a *= c; }
  friend Polynomial operator*(const Coefficient& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b);

  /// Text in the syntax accepted by parse_polynomial.
  std::string to_string(const VarSpace& space) const;

 private:
  void check_same_space(const Polynomial& o) const;

  int nvars_ = 0;
  Terms terms_;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t column)
      : std::runtime_error(what), column(column) {}
  std::size_t column;  // 1-based
};

/// Parses sums of products of numbers, variables, powers with natural
/// exponents, and parenthesized subexpressions, e.g. "3/4*x1 + x2 - 2/5"
/// or "(1 - u^2)^2". Division is allowed by constants only.
Polynomial parse_polynomial(std::string_view text, const VarSpace& space);

}  // namespace momentlmi
