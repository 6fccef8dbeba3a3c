#include "momentlmi/coefficient.h"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace momentlmi {

Coefficient Coefficient::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Coefficient(mpq_class(num, den));
}

namespace {

mpz_class pow10(long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

// Exact value of a decimal literal with optional fraction and exponent.
mpq_class parse_decimal(std::string_view s) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    std::string edigits;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) edigits.push_back(s[i]);
    if (edigits.empty() || edigits.size() > 6)
      throw std::invalid_argument("malformed exponent in '" + std::string(s) + "'");
    exponent = std::stol(edigits);
    if (eneg) exponent = -exponent;
  }
  if (i != s.size()) throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  mpq_class q{mpz_class(digits, 10)};
  const long shift = exponent - frac_digits;
  if (shift > 0) q *= pow10(shift);
  if (shift < 0) q /= pow10(-shift);
  q.canonicalize();
  return negative ? mpq_class(-q) : q;
}

}  // namespace

Coefficient Coefficient::Parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Coefficient(parse_decimal(text));
  const mpq_class num = parse_decimal(text.substr(0, slash));
  const mpq_class den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Coefficient(mpq_class(num / den));
}

bool Coefficient::is_zero() const {
  if (is_exact()) return sgn(std::get<mpq_class>(value_)) == 0;
  return std::get<double>(value_) == 0.0;
}

double Coefficient::to_double() const {
  if (is_exact()) return std::get<mpq_class>(value_).get_d();
  return std::get<double>(value_);
}

const mpq_class& Coefficient::rational() const {
  if (!is_exact()) throw std::logic_error("coefficient is not an exact rational");
  return std::get<mpq_class>(value_);
}

std::string Coefficient::to_string() const {
  if (is_exact()) return std::get<mpq_class>(value_).get_str();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(value_));
  std::string s(buf);
  // Keep floats distinguishable from integers when re-parsed.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

Coefficient Coefficient::operator-() const {
  if (is_exact()) return Coefficient(mpq_class(-std::get<mpq_class>(value_)));
  return Coefficient(-std::get<double>(value_));
}

#define MOMENTLMI_COEFF_OP(op)                                                   \
  Coefficient& Coefficient::operator op##=(const Coefficient& o) {               \
    if (is_exact() && o.is_exact()) {                                            \
      std::get<mpq_class>(value_) op## = std::get<mpq_class>(o.value_);          \
    } else {                                                                     \
      value_ = to_double() op o.to_double();                                     \
    }                                                                            \
    return *this;                                                                \
  }

MOMENTLMI_COEFF_OP(+)
MOMENTLMI_COEFF_OP(-)
MOMENTLMI_COEFF_OP(*)
#undef MOMENTLMI_COEFF_OP

Coefficient& Coefficient::operator/=(const Coefficient& o) {
  if (o.is_zero()) throw std::domain_error("division by zero coefficient");
  if (is_exact() && o.is_exact()) {
    std::get<mpq_class>(value_) /= std::get<mpq_class>(o.value_);
  } else {
    value_ = to_double() / o.to_double();
  }
  return *this;
}

bool operator==(const Coefficient& a, const Coefficient& b) {
  if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
  return a.to_double() == b.to_double();
}

}  // namespace momentlmi
