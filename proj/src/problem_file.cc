#include "momentlmi/problem_file.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "momentlmi/sdpa_io.h"

namespace momentlmi {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kPop:
      return "pop";
    case ProblemKind::kGmp:
      return "gmp";
    case ProblemKind::kSdp:
      return "sdp";
    case ProblemKind::kPencil:
      return "pencil";
  }
  return "?";
}

ProblemParseError::ProblemParseError(const std::string& message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

// A trimmed piece of a source line and where it starts.
struct Text {
  std::string value;
  int line = 0;
  int column = 1;
};

std::string_view trim(std::string_view s, int* shift = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (shift) *shift += static_cast<int>(b);
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const Text& at, const std::string& message, int offset = 0) {
  throw ProblemParseError(message, at.line, at.column + offset);
}

// Splits "key = value"; returns false when there is no '='.
bool split_key(const Text& t, Text* key, Text* value) {
  const auto eq = t.value.find('=');
  if (eq == std::string::npos) return false;
  int kshift = 0;
  key->value = std::string(trim(std::string_view(t.value).substr(0, eq), &kshift));
  key->line = t.line;
  key->column = t.column + kshift;
  int vshift = static_cast<int>(eq) + 1;
  value->value = std::string(trim(std::string_view(t.value).substr(eq + 1), &vshift));
  value->line = t.line;
  value->column = t.column + vshift;
  return true;
}

double number(const Text& t) {
  const std::string& s = t.value;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // Fractions such as 1/4 are accepted as well.
    try {
      return Coefficient::Parse(s).to_double();
    } catch (const std::exception&) {
      fail(t, "expected a number, got '" + s + "'");
    }
  }
  return v;
}

int integer(const Text& t) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.value.data(), t.value.data() + t.value.size(), v);
  if (ec != std::errc() || ptr != t.value.data() + t.value.size()) fail(t, "expected an integer, got '" + t.value + "'");
  return v;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Eigen::VectorXd vector_of(const Text& t, std::string_view text) {
  std::vector<double> v;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) v.push_back(number({w, t.line, t.column}));
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Polynomial polynomial(const Text& t, const VarSpace& space) {
  try {
    return parse_polynomial(t.value, space);
  } catch (const ParseError& e) {
    fail(t, e.what(), static_cast<int>(e.column) - 1);
  } catch (const std::exception& e) {
    fail(t, e.what());
  }
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Sections.

struct Section {
  std::string name;
  std::string argument;
  Text header;
  std::vector<Text> lines;
};

struct Document {
  std::vector<Text> top;
  std::vector<Section> sections;
};

Document split(std::string_view text) {
  Document doc;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    const bool in_sdpa = !doc.sections.empty() && doc.sections.back().name == "sdpa";
    // SDPA comments use '*' and '"'; '#' is ours everywhere.
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    int shift = 1;
    const std::string_view body = trim(raw, &shift);
    if (body.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (body.front() == '[' && !(in_sdpa && body.back() != ']')) {
      if (body.back() != ']') fail({std::string(body), lineno, shift}, "unterminated section header");
      Section s;
      const auto inner = words(std::string(body.substr(1, body.size() - 2)));
      if (inner.empty()) fail({std::string(body), lineno, shift}, "empty section header");
      s.name = inner[0];
      for (std::size_t i = 1; i < inner.size(); ++i) s.argument += (i > 1 ? " " : "") + inner[i];
      s.header = {std::string(body), lineno, shift};
      doc.sections.push_back(std::move(s));
    } else if (doc.sections.empty()) {
      doc.top.push_back({std::string(body), lineno, shift});
    } else {
      doc.sections.back().lines.push_back({std::string(body), lineno, shift});
    }
    if (end == text.size()) break;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// GMP terms: "<p, mu> + <q, nu>".

std::vector<MomentTerm> terms_of(const Text& t, const GMPProblem& g) {
  static const std::regex term(R"(<([^<>]*),\s*([A-Za-z_][A-Za-z0-9_]*)\s*>)");
  std::vector<MomentTerm> out;
  std::size_t consumed = 0;
  for (auto it = std::sregex_iterator(t.value.begin(), t.value.end(), term); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string between = t.value.substr(consumed, static_cast<std::size_t>(m.position()) - consumed);
    if (!trim(between).empty() && trim(between) != "+")
      fail(t, "expected '+' between moment terms, got '" + std::string(trim(between)) + "'", static_cast<int>(consumed));
    consumed = static_cast<std::size_t>(m.position() + m.length());
    const std::string name = m[2];
    int index = -1;
    try {
      index = g.measure_index(name);
    } catch (const std::invalid_argument&) {
      fail(t, "unknown measure '" + name + "'", static_cast<int>(m.position(2)));
    }
    Text poly{std::string(trim(m[1].str())), t.line, t.column + static_cast<int>(m.position(1))};
    out.push_back({name, polynomial(poly, g.measures[index].space())});
  }
  if (!trim(std::string_view(t.value).substr(consumed)).empty())
    fail(t, "unexpected text after moment terms", static_cast<int>(consumed));
  if (out.empty()) fail(t, "expected moment terms of the form <p, measure>");
  return out;
}

MomentConstraint constraint_of(const Text& t, const GMPProblem& g) {
  MomentConstraint c;
  const std::string& s = t.value;
  const auto first = s.find('<');
  std::size_t start = 0;
  if (first != std::string::npos) {
    const auto colon = s.rfind(':', first);
    if (colon != std::string::npos) {
      c.label = std::string(trim(std::string_view(s).substr(0, colon)));
      start = colon + 1;
    }
  }
  // The relation is the first '=', '<=' or '>=' outside the angle brackets.
  std::size_t close = std::string::npos, len = 0;
  int depth = 0;
  for (std::size_t i = start; i < s.size() && close == std::string::npos; ++i) {
    const bool eq_next = i + 1 < s.size() && s[i + 1] == '=';
    if (s[i] == '<' && depth == 0 && eq_next) {
      c.relation = Relation::kLe;
      close = i;
      len = 2;
    } else if (s[i] == '>' && depth == 0 && eq_next) {
      c.relation = Relation::kGe;
      close = i;
      len = 2;
    } else if (s[i] == '=' && depth == 0) {
      close = i;
      len = eq_next ? 2 : 1;
    } else if (s[i] == '<') {
      ++depth;
    } else if (s[i] == '>' && depth > 0) {
      --depth;
    }
  }
  if (close == std::string::npos) fail(t, "expected =, <= or >= after the moment terms");
  int rshift = static_cast<int>(close);
  const std::string_view rest = std::string_view(s).substr(close);
  int nshift = rshift + static_cast<int>(len);
  const std::string_view rhs = trim(rest.substr(len), &nshift);
  c.rhs = number({std::string(rhs), t.line, t.column + nshift});
  int tshift = static_cast<int>(start);
  const std::string_view lhs = trim(std::string_view(s).substr(start, close - start), &tshift);
  c.terms = terms_of({std::string(lhs), t.line, t.column + tshift}, g);
  return c;
}

std::string terms_text(const std::vector<MomentTerm>& terms, const GMPProblem& g) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& m = g.measures[g.measure_index(terms[i].measure)];
    out += (i ? " + " : "") + std::string("<") + terms[i].poly.to_string(m.space()) + ", " + terms[i].measure + ">";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Liouville sections.

struct PendingCell {
  Text header;
  std::string measure;
  std::string time;
  std::vector<std::string> states;
  std::vector<std::string> controls;
  std::vector<Text> f;
  std::optional<Text> lagrangian;
  std::optional<Text> terminal_cost;
  std::optional<double> horizon;
};

LiouvilleCell finish_cell(const PendingCell& p) {
  LiouvilleCell c;
  c.measure = p.measure;
  DynamicsSpec& d = c.dynamics;
  d.time = p.time;
  d.states = p.states;
  d.controls = p.controls;
  d.horizon = p.horizon;
  if (d.states.empty()) fail(p.header, "cell '" + p.measure + "' declares no states");
  if (p.f.size() != d.states.size()) {
    fail(p.header, "cell '" + p.measure + "' has " + std::to_string(p.f.size()) + " f lines for " +
                       std::to_string(d.states.size()) + " states");
  }
  const VarSpace space = d.space();
  for (const auto& t : p.f) d.f.push_back(polynomial(t, space));
  d.lagrangian = p.lagrangian ? polynomial(*p.lagrangian, space) : Polynomial(space.size());
  if (p.terminal_cost) d.terminal_cost = polynomial(*p.terminal_cost, VarSpace(d.states));
  return c;
}

Endpoint endpoint_of(const Text& t) {
  const auto w = words(t.value);
  if (w.size() == 2 && w[0] == "measure") return Endpoint::Measure(w[1]);
  if (!w.empty() && w[0] == "point") return Endpoint::Fixed(vector_of(t, std::string_view(t.value).substr(5)));
  fail(t, "expected 'measure NAME' or 'point v1 v2 ...'");
}

LiouvilleFamily family_of(const Section& s) {
  LiouvilleFamily fam;
  bool have_initial = false, have_terminal = false;
  std::optional<PendingCell> cell;
  for (const auto& line : s.lines) {
    Text key, value;
    if (!split_key(line, &key, &value)) fail(line, "expected 'key = value'");
    const std::string& k = key.value;
    if (k == "initial") {
      fam.initial = endpoint_of(value);
      have_initial = true;
    } else if (k == "terminal") {
      fam.terminal = endpoint_of(value);
      have_terminal = true;
    } else if (k == "cell") {
      if (cell) fam.cells.push_back(finish_cell(*cell));
      cell = PendingCell{};
      cell->header = value;
      cell->measure = value.value;
    } else {
      if (!cell) fail(key, "'" + k + "' before the first 'cell ='");
      if (k == "time") {
        cell->time = value.value;
      } else if (k == "states") {
        cell->states = words(value.value);
      } else if (k == "controls") {
        cell->controls = words(value.value);
      } else if (k == "f") {
        cell->f.push_back(value);
      } else if (k == "lagrangian") {
        cell->lagrangian = value;
      } else if (k == "terminal_cost") {
        cell->terminal_cost = value;
      } else if (k == "horizon") {
        cell->horizon = number(value);
      } else {
        fail(key, "unknown liouville key '" + k + "'");
      }
    }
  }
  if (cell) fam.cells.push_back(finish_cell(*cell));
  if (fam.cells.empty()) fail(s.header, "liouville section without cells");
  if (!have_initial || !have_terminal) fail(s.header, "liouville section needs 'initial =' and 'terminal ='");
  return fam;
}

std::string endpoint_text(const Endpoint& e) {
  if (!e.fixed()) return "measure " + e.measure;
  std::string out = "point";
  for (double v : *e.point) out += " " + shortest(v);
  return out;
}

// ---------------------------------------------------------------------------

const Section* find(const Document& doc, const std::string& name) {
  for (const auto& s : doc.sections)
    if (s.name == name) return &s;
  return nullptr;
}

VarSpace variables_of(const Document& doc, const Text& anchor) {
  const Section* s = find(doc, "variables");
  if (!s) fail(anchor, "missing [variables] section");
  std::vector<std::string> names;
  for (const auto& l : s->lines)
    for (auto& w : words(l.value)) names.push_back(w);
  try {
    return VarSpace(names);
  } catch (const std::exception& e) {
    fail(s->header, e.what());
  }
}

void check_sections(const Document& doc, std::initializer_list<const char*> allowed) {
  for (const auto& s : doc.sections) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || s.name == a;
    if (!ok) fail(s.header, "unexpected section [" + s.name + "]");
  }
}

void parse_pop(const Document& doc, const Text& anchor, ProblemFile* out) {
  check_sections(doc, {"variables", "objective", "inequalities", "equalities", "ball"});
  POPProblem& pop = out->pop;
  pop.feasible_set.space = variables_of(doc, anchor);
  const VarSpace& space = pop.feasible_set.space;
  const Section* obj = find(doc, "objective");
  if (!obj || obj->lines.size() != 1) fail(obj ? obj->header : anchor, "[objective] needs exactly one polynomial");
  pop.objective = polynomial(obj->lines[0], space);
  for (const auto& s : doc.sections) {
    if (s.name == "inequalities")
      for (const auto& l : s.lines) pop.feasible_set.inequalities.push_back(polynomial(l, space));
    if (s.name == "equalities")
      for (const auto& l : s.lines) pop.feasible_set.equalities.push_back(polynomial(l, space));
    if (s.name == "ball") {
      if (s.lines.size() != 1) fail(s.header, "[ball] needs exactly one number");
      pop.feasible_set.ball_radius = number(s.lines[0]);
    }
  }
}

void parse_gmp(const Document& doc, const std::map<std::string, Text>& top, ProblemFile* out) {
  check_sections(doc, {"measure", "constraints", "objective", "tie_break", "liouville"});
  GMPProblem& g = out->gmp;
  if (auto it = top.find("sense"); it != top.end()) {
    if (it->second.value == "minimize" || it->second.value == "min") {
      g.sense = Sense::kMinimize;
    } else if (it->second.value == "maximize" || it->second.value == "max") {
      g.sense = Sense::kMaximize;
    } else {
      fail(it->second, "sense must be minimize or maximize");
    }
  }
  if (auto it = top.find("offset"); it != top.end()) g.objective_offset = number(it->second);
  if (auto it = top.find("slack"); it != top.end()) g.tie_break_slack = number(it->second);

  for (const auto& s : doc.sections) {
    if (s.name != "measure") continue;
    if (s.argument.empty()) fail(s.header, "[measure] needs a name");
    MeasureDecl m;
    m.name = s.argument;
    bool have_vars = false;
    std::vector<Text> support, equality;
    for (const auto& l : s.lines) {
      Text key, value;
      if (!split_key(l, &key, &value)) fail(l, "expected 'key = value'");
      if (key.value == "variables") {
        try {
          m.support.space = VarSpace(words(value.value));
        } catch (const std::exception& e) {
          fail(value, e.what());
        }
        have_vars = true;
      } else if (key.value == "support") {
        support.push_back(value);
      } else if (key.value == "equality") {
        equality.push_back(value);
      } else if (key.value == "ball") {
        m.support.ball_radius = number(value);
      } else {
        fail(key, "unknown measure key '" + key.value + "'");
      }
    }
    if (!have_vars) fail(s.header, "measure '" + m.name + "' needs 'variables ='");
    for (const auto& t : support) m.support.inequalities.push_back(polynomial(t, m.support.space));
    for (const auto& t : equality) m.support.equalities.push_back(polynomial(t, m.support.space));
    for (const auto& other : g.measures)
      if (other.name == m.name) fail(s.header, "measure '" + m.name + "' declared twice");
    g.measures.push_back(std::move(m));
  }
  for (const auto& s : doc.sections) {
    if (s.name == "constraints") {
      for (const auto& l : s.lines) g.constraints.push_back(constraint_of(l, g));
    } else if (s.name == "objective" || s.name == "tie_break") {
      auto& target = s.name == "objective" ? g.objective : g.tie_break;
      for (const auto& l : s.lines)
        for (auto& t : terms_of(l, g)) target.push_back(std::move(t));
    } else if (s.name == "liouville") {
      g.liouville.push_back(family_of(s));
    }
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    fail(doc.sections.empty() ? Text{"", 1, 1} : doc.sections.front().header, e.what());
  }
}

void parse_sdp(const Document& doc, const Text& anchor, ProblemFile* out) {
  check_sections(doc, {"sdpa"});
  const Section* s = find(doc, "sdpa");
  if (!s) fail(anchor, "missing [sdpa] section");
  std::string body;
  for (const auto& l : s->lines) body += l.value + "\n";
  try {
    out->sdp = parse_sdpa(body);
  } catch (const SdpaParseError& e) {
    const int index = e.line() - 1;
    const Text& at = index >= 0 && index < static_cast<int>(s->lines.size()) ? s->lines[index] : s->header;
    fail(at, e.what());
  }
}

void parse_pencil(const Document& doc, const Text& anchor, ProblemFile* out) {
  check_sections(doc, {"variables", "matrix", "points"});
  out->pencil_space = variables_of(doc, anchor);
  const int n = out->pencil_space.size();
  const Section* mat = find(doc, "matrix");
  if (!mat || mat->lines.empty()) fail(mat ? mat->header : anchor, "missing [matrix] rows");
  const int m = static_cast<int>(mat->lines.size());
  std::vector<std::vector<Polynomial>> entries;
  for (const auto& l : mat->lines) {
    std::vector<Polynomial> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = l.value.find(',', start);
      const std::size_t stop = comma == std::string::npos ? l.value.size() : comma;
      int shift = static_cast<int>(start);
      const auto piece = trim(std::string_view(l.value).substr(start, stop - start), &shift);
      const Text cell{std::string(piece), l.line, l.column + shift};
      Polynomial p = polynomial(cell, out->pencil_space);
      if (p.degree() > 1) fail(cell, "pencil entries must be affine");
      row.push_back(std::move(p));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (static_cast<int>(row.size()) != m) fail(l, "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(m));
    entries.push_back(std::move(row));
  }
  Pencil p(n, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!(entries[i][j] == entries[j][i])) fail(mat->lines[i], "matrix is not symmetric");
      if (j < i) continue;
      p.set(0, i, j, entries[i][j].coefficient(Exponent::Zero(n)));
      for (int k = 0; k < n; ++k) p.set(k + 1, i, j, entries[i][j].coefficient(Exponent::Unit(n, k)));
    }
  }
  out->pencil = std::move(p);
  if (const Section* pts = find(doc, "points")) {
    for (const auto& l : pts->lines) {
      Eigen::VectorXd x = vector_of(l, l.value);
      if (x.size() != n) fail(l, "point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(n));
      out->points.push_back(std::move(x));
    }
  }
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  const Document doc = split(text);
  std::map<std::string, Text> top;
  for (const auto& t : doc.top) {
    Text key, value;
    if (!split_key(t, &key, &value)) fail(t, "expected 'key = value' before the first section");
    if (top.count(key.value)) fail(key, "duplicate key '" + key.value + "'");
    top[key.value] = value;
  }
  const Text anchor = doc.top.empty() ? Text{"", 1, 1} : doc.top.front();
  auto kind = top.find("kind");
  if (kind == top.end()) fail(anchor, "missing 'kind = pop|gmp|sdp|pencil'");
  ProblemFile out;
  const std::string& k = kind->second.value;
  if (k == "pop") {
    out.kind = ProblemKind::kPop;
  } else if (k == "gmp") {
    out.kind = ProblemKind::kGmp;
  } else if (k == "sdp") {
    out.kind = ProblemKind::kSdp;
  } else if (k == "pencil") {
    out.kind = ProblemKind::kPencil;
  } else {
    fail(kind->second, "unknown kind '" + k + "'");
  }
  for (const auto& [key, value] : top) {
    const bool gmp_key = key == "sense" || key == "offset" || key == "slack";
    if (key == "kind" || key == "name" || key == "order" || (gmp_key && out.kind == ProblemKind::kGmp)) continue;
    fail(value, "unknown key '" + key + "'", -static_cast<int>(key.size()) - 3);
  }
  if (auto it = top.find("name"); it != top.end()) out.name = it->second.value;
  if (auto it = top.find("order"); it != top.end()) out.order = integer(it->second);

  switch (out.kind) {
    case ProblemKind::kPop:
      parse_pop(doc, kind->second, &out);
      break;
    case ProblemKind::kGmp:
      parse_gmp(doc, top, &out);
      break;
    case ProblemKind::kSdp:
      parse_sdp(doc, kind->second, &out);
      break;
    case ProblemKind::kPencil:
      parse_pencil(doc, kind->second, &out);
      break;
  }
  return out;
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string print_problem(const ProblemFile& p) {
  std::ostringstream out;
  out << "kind = " << to_string(p.kind) << "\n";
  if (!p.name.empty()) out << "name = " << p.name << "\n";
  if (p.order) out << "order = " << *p.order << "\n";

  auto names = [](const VarSpace& s) {
    std::string line;
    for (int i = 0; i < s.size(); ++i) line += (i ? " " : "") + s.name(i);
    return line;
  };

  switch (p.kind) {
    case ProblemKind::kPop: {
      const auto& set = p.pop.feasible_set;
      out << "\n[variables]\n" << names(set.space) << "\n";
      out << "\n[objective]\n" << p.pop.objective.to_string(set.space) << "\n";
      if (!set.inequalities.empty()) {
        out << "\n[inequalities]\n";
        for (const auto& q : set.inequalities) out << q.to_string(set.space) << "\n";
      }
      if (!set.equalities.empty()) {
        out << "\n[equalities]\n";
        for (const auto& q : set.equalities) out << q.to_string(set.space) << "\n";
      }
      if (set.ball_radius) out << "\n[ball]\n" << shortest(*set.ball_radius) << "\n";
      break;
    }
    case ProblemKind::kGmp: {
      const GMPProblem& g = p.gmp;
      out << "sense = " << (g.sense == Sense::kMinimize ? "minimize" : "maximize") << "\n";
      if (g.objective_offset != 0.0) out << "offset = " << shortest(g.objective_offset) << "\n";
      if (!g.tie_break.empty()) out << "slack = " << shortest(g.tie_break_slack) << "\n";
      for (const auto& m : g.measures) {
        out << "\n[measure " << m.name << "]\n";
        out << "variables = " << names(m.space()) << "\n";
        for (const auto& q : m.support.inequalities) out << "support = " << q.to_string(m.space()) << "\n";
        for (const auto& q : m.support.equalities) out << "equality = " << q.to_string(m.space()) << "\n";
        if (m.support.ball_radius) out << "ball = " << shortest(*m.support.ball_radius) << "\n";
      }
      if (!g.constraints.empty()) {
        out << "\n[constraints]\n";
        for (const auto& c : g.constraints) {
          out << (c.label.empty() ? "" : c.label + ": ") << terms_text(c.terms, g) << " " << to_string(c.relation)
              << " " << shortest(c.rhs) << "\n";
        }
      }
      if (!g.objective.empty()) out << "\n[objective]\n" << terms_text(g.objective, g) << "\n";
      if (!g.tie_break.empty()) out << "\n[tie_break]\n" << terms_text(g.tie_break, g) << "\n";
      for (const auto& fam : g.liouville) {
        out << "\n[liouville]\n";
        out << "initial = " << endpoint_text(fam.initial) << "\n";
        out << "terminal = " << endpoint_text(fam.terminal) << "\n";
        for (const auto& cell : fam.cells) {
          const DynamicsSpec& d = cell.dynamics;
          const VarSpace space = d.space();
          out << "cell = " << cell.measure << "\n";
          if (!d.time.empty()) out << "time = " << d.time << "\n";
          out << "states = " << names(VarSpace(d.states)) << "\n";
          if (!d.controls.empty()) out << "controls = " << names(VarSpace(d.controls)) << "\n";
          for (const auto& f : d.f) out << "f = " << f.to_string(space) << "\n";
          if (!d.lagrangian.is_zero()) out << "lagrangian = " << d.lagrangian.to_string(space) << "\n";
          if (d.terminal_cost) out << "terminal_cost = " << d.terminal_cost->to_string(VarSpace(d.states)) << "\n";
          if (d.horizon) out << "horizon = " << shortest(*d.horizon) << "\n";
        }
      }
      break;
    }
    case ProblemKind::kSdp:
      out << "\n[sdpa]\n" << to_sdpa(p.sdp);
      break;
    case ProblemKind::kPencil: {
      out << "\n[variables]\n" << names(p.pencil_space) << "\n";
      out << "\n[matrix]\n";
      const Pencil& pen = *p.pencil;
      for (int i = 0; i < pen.m(); ++i) {
        for (int j = 0; j < pen.m(); ++j) out << (j ? ", " : "") << pen.entry(i, j).to_string(p.pencil_space);
        out << "\n";
      }
      if (!p.points.empty()) {
        out << "\n[points]\n";
        for (const auto& x : p.points) {
          for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? " " : "") << shortest(x(i));
          out << "\n";
        }
      }
      break;
    }
  }
  return out.str();
}

}  // namespace momentlmi
