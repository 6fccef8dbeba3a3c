#include "momentlmi/polynomial.h"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <set>

namespace momentlmi {

// ---------------------------------------------------------------- Exponent

Exponent::Exponent(std::vector<int> powers) : powers_(std::move(powers)) {
  for (int p : powers_) {
    if (p < 0) throw std::invalid_argument("negative exponent entry");
  }
}

Exponent Exponent::Unit(int nvars, int i) {
  std::vector<int> p(nvars, 0);
  p.at(i) = 1;
  return Exponent(std::move(p));
}

int Exponent::degree() const { return std::accumulate(powers_.begin(), powers_.end(), 0); }

Exponent Exponent::operator+(const Exponent& o) const {
  if (o.nvars() != nvars()) throw std::invalid_argument("exponent length mismatch");
  std::vector<int> p(powers_);
  for (int i = 0; i < nvars(); ++i) p[i] += o.powers_[i];
  return Exponent(std::move(p));
}

std::string Exponent::to_string() const {
  std::string s = "(";
  for (int i = 0; i < nvars(); ++i) {
    if (i) s += ",";
    s += std::to_string(powers_[i]);
  }
  return s + ")";
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  return a.powers() > b.powers();
}

// ------------------------------------------------------- graded indexing

std::size_t monomial_count(int n, int d) {
  if (n < 0 || d < 0) throw std::invalid_argument("monomial_count needs n, d >= 0");
  // Running product C(d+i, i) = C(d+i-1, i-1) * (d+i) / i; each step is exact.
  unsigned __int128 result = 1;
  for (int i = 1; i <= n; ++i) {
    result = result * static_cast<unsigned>(d + i) / static_cast<unsigned>(i);
    if (result > std::numeric_limits<std::size_t>::max()) {
      throw std::overflow_error("monomial_count(" + std::to_string(n) + ", " +
                                std::to_string(d) + ") overflows");
    }
  }
  return static_cast<std::size_t>(result);
}

std::size_t grlex_index(const Exponent& e) {
  const int n = e.nvars();
  int rem = e.degree();
  std::size_t index = rem == 0 ? 0 : monomial_count(n, rem - 1);
  for (int i = 0; i + 1 < n; ++i) {
    // Exponents whose i-th entry exceeds e[i] come first.
    const int k = n - i - 1;
    if (rem - e[i] - 1 >= 0) index += monomial_count(k, rem - e[i] - 1);
    rem -= e[i];
  }
  return index;
}

Exponent grlex_exponent(int n, std::size_t k) {
  if (n == 0) {
    if (k != 0) throw std::out_of_range("grlex index out of range for n = 0");
    return Exponent();
  }
  int d = 0;
  while (monomial_count(n, d) <= k) ++d;
  std::size_t r = k - (d == 0 ? 0 : monomial_count(n, d - 1));
  std::vector<int> p(n, 0);
  int rem = d;
  for (int i = 0; i + 1 < n; ++i) {
    const int parts = n - i - 1;
    for (int v = rem; v >= 0; --v) {
      const std::size_t block = monomial_count(parts - 1, rem - v);
      if (r < block) {
        p[i] = v;
        break;
      }
      r -= block;
    }
    rem -= p[i];
  }
  p[n - 1] = rem;
  return Exponent(std::move(p));
}

std::vector<Exponent> monomials_up_to(int n, int d) {
  const std::size_t count = monomial_count(n, d);
  std::vector<Exponent> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(grlex_exponent(n, k));
  return out;
}

// ---------------------------------------------------------------- VarSpace

VarSpace::VarSpace(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw std::invalid_argument("empty variable name");
    if (!seen.insert(name).second) throw std::invalid_argument("duplicate variable '" + name + "'");
  }
}

VarSpace VarSpace::Numbered(int n, const std::string& prefix) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
  return VarSpace(std::move(names));
}

std::optional<int> VarSpace::index_of(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(int nvars, const Coefficient& constant) : nvars_(nvars) {
  add_term(Exponent::Zero(nvars), constant);
}

Polynomial Polynomial::Monomial(const Exponent& e, const Coefficient& c) {
  Polynomial p(e.nvars());
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::Variable(int nvars, int i) { return Monomial(Exponent::Unit(nvars, i)); }

int Polynomial::degree() const {
  // Terms are graded, so the last one has maximal degree.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

bool Polynomial::is_exact() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.is_exact(); });
}

Coefficient Polynomial::coefficient(const Exponent& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? Coefficient(0) : it->second;
}

int Polynomial::degree_in(int i) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
  return d;
}

void Polynomial::add_term(const Exponent& e, const Coefficient& c) {
  if (e.nvars() != nvars_) throw std::invalid_argument("term has wrong number of variables");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != nvars_) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", polynomial has " + std::to_string(nvars_) + " variables");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c.to_double();
    for (int i = 0; i < nvars_; ++i) {
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    }
    sum += m;
  }
  return sum;
}

Coefficient Polynomial::evaluate_exact(std::span<const Coefficient> x) const {
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("point dimension mismatch");
  Coefficient sum = 0;
  for (const auto& [e, c] : terms_) {
    Coefficient m = c;
    for (int i = 0; i < nvars_; ++i) {
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    }
    sum += m;
  }
  return sum;
}

Polynomial Polynomial::partial(int i) const {
  if (i < 0 || i >= nvars_) throw std::out_of_range("partial: variable index out of range");
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    std::vector<int> p = e.powers();
    const int k = p[i]--;
    out.add_term(Exponent(std::move(p)), c * Coefficient(k));
  }
  return out;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result(nvars_, 1);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

Polynomial Polynomial::substitute(int i, const Coefficient& value) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    std::vector<int> p = e.powers();
    Coefficient f = c;
    for (int k = 0; k < p[i]; ++k) f *= value;
    p[i] = 0;
    out.add_term(Exponent(std::move(p)), f);
  }
  return out;
}

Polynomial Polynomial::scale_variable(int i, const Coefficient& factor) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    Coefficient f = c;
    for (int k = 0; k < e[i]; ++k) f *= factor;
    out.add_term(e, f);
  }
  return out;
}

Polynomial Polynomial::remap(std::span<const int> target, int nvars) const {
  if (static_cast<int>(target.size()) != nvars_) throw std::invalid_argument("remap: target size mismatch");
  Polynomial out(nvars);
  for (const auto& [e, c] : terms_) {
    std::vector<int> p(nvars, 0);
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (target[i] < 0) throw std::invalid_argument("remap: dropped variable occurs in polynomial");
      p.at(target[i]) += e[i];
    }
    out.add_term(Exponent(std::move(p)), c);
  }
  return out;
}

Polynomial Polynomial::to_float() const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) out.add_term(e, Coefficient(c.to_double()));
  return out;
}

void Polynomial::check_same_space(const Polynomial& o) const {
  if (o.nvars_ != nvars_) {
    throw std::invalid_argument("polynomials over " + std::to_string(nvars_) + " and " +
                                std::to_string(o.nvars_) + " variables");
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_space(b);
  Polynomial out(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) out.add_term(ea + eb, ca * cb);
  }
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) { return *this = *this * o; }

Polynomial& Polynomial::operator*=(const Coefficient& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  out *= Coefficient(-1);
  return out;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
  auto ib = b.terms_.begin();
  for (const auto& [e, c] : a.terms_) {
    if (!(ib->first == e) || ib->second != c) return false;
    ++ib;
  }
  return true;
}

std::string Polynomial::to_string(const VarSpace& space) const {
  if (space.size() != nvars_) throw std::invalid_argument("to_string: variable space mismatch");
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    std::string coeff = c.to_string();
    const bool negative = coeff.front() == '-';
    if (negative) coeff.erase(0, 1);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += space.name(i);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (mono.empty()) {
      out += coeff;
    } else if (coeff == "1") {
      out += mono;
    } else {
      out += coeff + "*" + mono;
    }
  }
  return out;
}

// ------------------------------------------------------------------ parser

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const VarSpace& space) : text_(text), space_(space) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("column " + std::to_string(pos_ + 1) + ": " + msg, pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (accept('*')) {
        acc *= unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Polynomial d = unary();
        if (d.degree() != 0 || d.is_zero()) {
          pos_ = at;
          fail("division by a non-constant or zero expression");
        }
        acc *= Coefficient(1) / d.coefficient(Exponent::Zero(space_.size()));
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a natural exponent after '^'");
      const int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
      return base.pow(k);
    }
    return base;
  }

  Polynomial primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      const auto idx = space_.index_of(name);
      if (!idx) {
        pos_ = start;
        fail("unknown variable '" + name + "'");
      }
      return Polynomial::Variable(space_.size(), *idx);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Polynomial number() {
    const std::size_t start = pos_;
    auto digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (digit(pos_) || (pos_ < text_.size() && text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (digit(k)) {
        pos_ = k;
        while (digit(pos_)) ++pos_;
      }
    }
    try {
      return Polynomial(space_.size(), Coefficient::Parse(text_.substr(start, pos_ - start)));
    } catch (const std::invalid_argument& e) {
      pos_ = start;
      fail(e.what());
    }
  }

  std::string_view text_;
  const VarSpace& space_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, const VarSpace& space) {
  return PolyParser(text, space).parse();
}

}  // namespace momentlmi
