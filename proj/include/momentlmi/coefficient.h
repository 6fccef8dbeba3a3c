#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <variant>

namespace momentlmi {

/// A polynomial coefficient. Holds an exact rational until an inexact
/// (binary float) value enters the computation; mixing the two yields a
/// float.
class Coefficient {
 public:
  Coefficient() : value_(mpq_class(0)) {}
  Coefficient(int v) : value_(mpq_class(v)) {}    // NOLINT
  Coefficient(long v) : value_(mpq_class(v)) {}   // NOLINT
  Coefficient(double v) : value_(v) {}            // NOLINT
  explicit Coefficient(mpq_class q) : value_(std::move(q)) {
    std::get<mpq_class>(value_).canonicalize();
  }

  static Coefficient Rational(long num, long den);

  /// Parses an integer, a fraction "p/q", or a decimal literal such as
  /// "0.125" or "1e-3". Decimals are converted exactly.
  static Coefficient Parse(std::string_view text);

  bool is_exact() const { return std::holds_alternative<mpq_class>(value_); }
  bool is_zero() const;
  double to_double() const;
  /// Requires is_exact().
  const mpq_class& rational() const;

  /// Round-trippable text: "3/4", "-2", or a 17-digit float.
  std::string to_string() const;

  Coefficient operator-() const;
  Coefficient& operator+=(const Coefficient& o);
  Coefficient& operator-=(const Coefficient& o);
  Coefficient& operator*=(const Coefficient& o);
  Coefficient& operator/=(const Coefficient& o);

  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
  friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
  friend Coefficient operator/(Coefficient a, const Coefficient& b) { return a /= b; }
  friend bool operator==(const Coefficient& a, const Coefficient& b);
  friend bool operator!=(const Coefficient& a, const Coefficient& b) { return !(a == b); }

 private:
  std::variant<mpq_class, double> value_;
};

}  // namespace momentlmi
