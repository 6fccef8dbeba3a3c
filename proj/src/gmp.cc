#include "momentlmi/gmp.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace momentlmi {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out + "}";
}

// Slot of each name of `from` in `to`, or -1.
std::vector<int> name_map(const VarSpace& from, const VarSpace& to) {
  std::vector<int> target(from.size(), -1);
  for (int i = 0; i < from.size(); ++i) {
    if (auto j = to.index_of(from.name(i))) target[i] = *j;
  }
  return target;
}

// Map from `from` onto a measure space that must hold exactly the same
// names.
std::vector<int> exact_map(const VarSpace& from, const MeasureDecl& m, const std::string& role) {
  const auto target = name_map(from, m.space());
  const bool all = std::all_of(target.begin(), target.end(), [](int t) { return t >= 0; });
  if (!all || from.size() != m.space().size()) {
    throw std::invalid_argument(role + " measure '" + m.name + "' has variables " + join(m.space().names()) +
                                " but the dynamics need " + join(from.names()));
  }
  return target;
}

Coefficient exact(double v) { return Coefficient(mpq_class(v)); }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void append_term(MomentConstraint* row, const std::string& measure, const Polynomial& p) {
  if (p.is_zero()) return;
  for (auto& t : row->terms) {
    if (t.measure == measure) {
      t.poly += p;
      return;
    }
  }
  row->terms.push_back({measure, p});
}

void check_compatible(const DynamicsSpec& a, const DynamicsSpec& b) {
  if (a.time != b.time || a.states != b.states || a.controls != b.controls || a.horizon != b.horizon) {
    throw std::invalid_argument("cells of one Liouville family must share time, states, controls and horizon");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

VarSpace DynamicsSpec::space() const {
  std::vector<std::string> names;
  if (!time.empty()) names.push_back(time);
  names.insert(names.end(), states.begin(), states.end());
  names.insert(names.end(), controls.begin(), controls.end());
  return VarSpace(names);
}

VarSpace DynamicsSpec::test_space() const {
  std::vector<std::string> names;
  if (!time.empty()) names.push_back(time);
  names.insert(names.end(), states.begin(), states.end());
  return VarSpace(names);
}

void DynamicsSpec::validate() const {
  if (states.empty()) throw std::invalid_argument("dynamics need at least one state");
  const int n = space().size();
  if (f.size() != states.size()) {
    throw std::invalid_argument("dynamics give " + std::to_string(f.size()) + " right-hand sides for " +
                                std::to_string(states.size()) + " states");
  }
  for (const auto& fi : f) {
    if (fi.nvars() != n) throw std::invalid_argument("dynamics polynomial has the wrong number of variables");
  }
  if (!lagrangian.is_zero() && lagrangian.nvars() != n)
    throw std::invalid_argument("running cost has the wrong number of variables");
  if (terminal_cost && terminal_cost->nvars() != static_cast<int>(states.size()))
    throw std::invalid_argument("terminal cost must be a polynomial in the states only");
  if (autonomous() && horizon) throw std::invalid_argument("autonomous dynamics take a free horizon");
  if (horizon && !(*horizon > 0)) throw std::invalid_argument("horizon must be positive");
}

int GMPProblem::measure_index(const std::string& name) const {
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (measures[i].name == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown measure '" + name + "'");
}

void GMPProblem::validate() const {
  std::set<std::string> names;
  for (const auto& m : measures) {
    if (m.name.empty()) throw std::invalid_argument("measure without a name");
    if (!names.insert(m.name).second) throw std::invalid_argument("duplicate measure '" + m.name + "'");
    if (m.space().size() == 0) throw std::invalid_argument("measure '" + m.name + "' has no variables");
    m.support.validate();
  }
  auto check_term = [&](const MomentTerm& t, const std::string& where) {
    const auto& m = measures[measure_index(t.measure)];
    if (t.poly.nvars() != m.space().size()) {
      throw std::invalid_argument(where + ": polynomial arity differs from measure '" + t.measure + "'");
    }
  };
  bool inhomogeneous = false;
  for (const auto& c : constraints) {
    for (const auto& t : c.terms) check_term(t, "constraint '" + c.label + "'");
    if (c.rhs != 0.0) inhomogeneous = true;
  }
  for (const auto& t : objective) check_term(t, "objective");
  for (const auto& fam : liouville) {
    if (fam.cells.empty()) throw std::invalid_argument("Liouville family without cells");
    for (const auto& cell : fam.cells) {
      cell.dynamics.validate();
      check_compatible(fam.cells.front().dynamics, cell.dynamics);
      measure_index(cell.measure);
    }
    for (const auto* e : {&fam.initial, &fam.terminal}) {
      if (e->fixed()) {
        inhomogeneous = true;
        if (e->point->size() != static_cast<Eigen::Index>(fam.cells.front().dynamics.states.size()))
          throw std::invalid_argument("fixed endpoint dimension differs from the state dimension");
      } else {
        measure_index(e->measure);
      }
    }
  }
  if (!inhomogeneous) {
    throw std::invalid_argument(
        "every constraint is homogeneous, so the zero measure is feasible; add a normalization such as a mass "
        "constraint");
  }
}

// ---------------------------------------------------------------------------

std::vector<MomentConstraint> piecewise_liouville(const LiouvilleFamily& family, const GMPProblem& context, int r,
                                                  std::vector<std::string>* notes) {
  if (family.cells.empty()) throw std::invalid_argument("Liouville family without cells");
  const DynamicsSpec& dyn0 = family.cells.front().dynamics;
  for (const auto& cell : family.cells) {
    cell.dynamics.validate();
    check_compatible(dyn0, cell.dynamics);
  }
  const bool timed = !dyn0.autonomous();
  const VarSpace D = dyn0.space();
  const VarSpace V = dyn0.test_space();
  const VarSpace S(dyn0.states);
  const int n = static_cast<int>(dyn0.states.size());
  const int t0 = timed ? 1 : 0;  // slot of the first state in V and D

  // Occupation measures: exactly the dynamics' variables.
  std::vector<std::vector<int>> cell_maps;
  for (const auto& cell : family.cells)
    cell_maps.push_back(exact_map(D, context.measures[context.measure_index(cell.measure)], "occupation"));

  // Endpoint measures carry the states; a free-horizon terminal measure of
  // timed dynamics also carries the time.
  std::vector<int> init_map, term_map;
  if (!family.initial.fixed())
    init_map = exact_map(S, context.measures[context.measure_index(family.initial.measure)], "initial");
  const bool terminal_timed = timed && !dyn0.horizon;
  if (terminal_timed && family.terminal.fixed())
    throw std::invalid_argument("a free horizon needs a terminal measure carrying the time");
  if (!family.terminal.fixed()) {
    term_map = exact_map(terminal_timed ? V : S, context.measures[context.measure_index(family.terminal.measure)],
                         "terminal");
  }
  for (const auto* e : {&family.initial, &family.terminal}) {
    if (e->fixed() && e->point->size() != n)
      throw std::invalid_argument("fixed endpoint dimension differs from the state dimension");
  }

  int deg_f = 0;
  for (const auto& cell : family.cells)
    for (const auto& fi : cell.dynamics.f) deg_f = std::max(deg_f, fi.degree());
  const int dmax = std::min(2 * r, 2 * r + 1 - deg_f);
  if (dmax < 0) throw std::invalid_argument("dynamics degree too high for order " + std::to_string(r));
  if (dmax < 2 * r && notes) {
    notes->push_back("test functions trimmed to degree " + std::to_string(dmax) + " because the dynamics have degree " +
                     std::to_string(deg_f));
  }

  // Lifts V into D (V is a prefix of D) and drops the time from V.
  std::vector<int> lift(V.size());
  std::iota(lift.begin(), lift.end(), 0);
  std::vector<int> drop_time(V.size());
  for (int i = 0; i < V.size(); ++i) drop_time[i] = i - t0;

  std::vector<MomentConstraint> rows;
  for (const Exponent& e : monomials_up_to(V.size(), dmax)) {
    const Polynomial v = Polynomial::Monomial(e);
    MomentConstraint row;
    row.label = "liouville v = " + v.to_string(V);
    const Polynomial vD = v.remap(lift, D.size());
    for (std::size_t c = 0; c < family.cells.size(); ++c) {
      const DynamicsSpec& dyn = family.cells[c].dynamics;
      Polynomial Lv(D.size());
      if (timed) Lv += vD.partial(0);
      for (int i = 0; i < n; ++i) Lv += vD.partial(t0 + i) * dyn.f[i];
      append_term(&row, family.cells[c].measure, Lv.remap(cell_maps[c], D.size()));
    }

    const Polynomial v0 = (timed ? v.substitute(0, 0) : v).remap(drop_time, n);
    if (family.initial.fixed()) {
      const Eigen::VectorXd& x0 = *family.initial.point;
      row.rhs -= v0.evaluate(std::span<const double>(x0.data(), static_cast<std::size_t>(n)));
    } else {
      append_term(&row, family.initial.measure, v0.remap(init_map, n));
    }

    if (terminal_timed) {
      append_term(&row, family.terminal.measure, -v.remap(term_map, V.size()));
    } else {
      const Polynomial vT = (timed ? v.substitute(0, exact(*dyn0.horizon)) : v).remap(drop_time, n);
      if (family.terminal.fixed()) {
        const Eigen::VectorXd& xT = *family.terminal.point;
        row.rhs += vT.evaluate(std::span<const double>(xT.data(), static_cast<std::size_t>(n)));
      } else {
        append_term(&row, family.terminal.measure, -vT.remap(term_map, n));
      }
    }

    std::erase_if(row.terms, [](const MomentTerm& t) { return t.poly.is_zero(); });
    if (row.terms.empty()) {
      if (std::abs(row.rhs) <= 1e-14) continue;
      if (notes) notes->push_back(row.label + " has no moment terms but right-hand side " + format_number(row.rhs));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MomentConstraint> liouville_constraints(const DynamicsSpec& dyn, const std::string& occupation,
                                                    const Endpoint& initial, const Endpoint& terminal,
                                                    const GMPProblem& context, int r,
                                                    std::vector<std::string>* notes) {
  return piecewise_liouville(LiouvilleFamily{{{dyn, occupation}}, initial, terminal}, context, r, notes);
}

void add_control_objective(const LiouvilleFamily& family, GMPProblem* g) {
  for (const auto& cell : family.cells) {
    const auto& dyn = cell.dynamics;
    if (dyn.lagrangian.is_zero()) continue;
    const auto map = exact_map(dyn.space(), g->measures[g->measure_index(cell.measure)], "occupation");
    g->objective.push_back({cell.measure, dyn.lagrangian.remap(map, dyn.space().size())});
  }
  const auto& dyn0 = family.cells.front().dynamics;
  if (!dyn0.terminal_cost) return;
  if (family.terminal.fixed()) {
    const Eigen::VectorXd& xT = *family.terminal.point;
    g->objective_offset += dyn0.terminal_cost->evaluate(std::span<const double>(xT.data(), xT.size()));
    return;
  }
  const MeasureDecl& m = g->measures[g->measure_index(family.terminal.measure)];
  const auto map = name_map(VarSpace(dyn0.states), m.space());
  if (std::any_of(map.begin(), map.end(), [](int t) { return t < 0; }))
    throw std::invalid_argument("terminal measure '" + m.name + "' lacks a state variable");
  g->objective.push_back({m.name, dyn0.terminal_cost->remap(map, m.space().size())});
}

// ---------------------------------------------------------------------------

GMPProblem normalize_time(const GMPProblem& g, std::map<std::string, TimeScale>* time_scale) {
  GMPProblem h = g;
  std::map<std::string, TimeScale> scales;
  for (auto& fam : h.liouville) {
    for (auto& cell : fam.cells) {
      auto& dyn = cell.dynamics;
      if (dyn.autonomous() || !dyn.horizon || *dyn.horizon == 1.0) continue;
      const Coefficient T = exact(*dyn.horizon);
      for (auto& fi : dyn.f) fi = fi.scale_variable(0, T) * T;
      if (!dyn.lagrangian.is_zero()) dyn.lagrangian = dyn.lagrangian.scale_variable(0, T) * T;
      const MeasureDecl& m = h.measures[h.measure_index(cell.measure)];
      const int ti = *m.space().index_of(dyn.time);
      auto [it, fresh] = scales.emplace(cell.measure, TimeScale{ti, *dyn.horizon});
      if (!fresh && it->second.horizon != *dyn.horizon)
        throw std::invalid_argument("measure '" + cell.measure + "' is used with two different horizons");
      dyn.horizon = 1.0;
    }
  }
  for (auto& m : h.measures) {
    auto it = scales.find(m.name);
    if (it == scales.end()) continue;
    const Coefficient T = exact(it->second.horizon);
    for (auto* list : {&m.support.inequalities, &m.support.equalities})
      for (auto& p : *list) p = p.scale_variable(it->second.time_index, T);
  }
  auto rescale = [&](MomentTerm& t) {
    auto it = scales.find(t.measure);
    if (it == scales.end()) return;
    const Coefficient T = exact(it->second.horizon);
    t.poly = t.poly.scale_variable(it->second.time_index, T) * T;
  };
  for (auto& c : h.constraints)
    for (auto& t : c.terms) rescale(t);
  for (auto& t : h.objective) rescale(t);
  if (time_scale) *time_scale = std::move(scales);
  return h;
}

MomentVector unscale_time(const MomentVector& y, int time_index, double T) {
  MomentVector out = y;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const Exponent e = grlex_exponent(y.nvars(), k);
    out[k] = y[k] * std::pow(T, e[time_index] + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------

GMPRelaxation build_gmp_relaxation(const GMPProblem& g, int r) {
  g.validate();
  GMPRelaxation out;
  out.order = r;
  const GMPProblem h = normalize_time(g, &out.time_scale);

  MomentProgramBuilder builder;
  std::vector<int> groups;
  for (const auto& m : h.measures) {
    const int rx = set_order(m.support);
    if (r < rx) {
      throw OrderError("relaxation order " + std::to_string(r) + " is below the minimal order r_X = " +
                           std::to_string(rx) + " of measure '" + m.name + "'",
                       rx);
    }
    const int n = m.space().size();
    const int grp = builder.add_group(n, 2 * r);
    groups.push_back(grp);
    out.measures.push_back({m.name, n, builder.offset(grp), builder.group_size(grp)});
    builder.add_psd(grp, MatrixStencil::Moment(n, r));
    for (const auto& q : m.support.assembled_inequalities())
      builder.add_psd(grp, MatrixStencil::Localizing(q, r - half_degree(q)));
    if (!m.support.compactness_certified()) {
      out.warnings.push_back("support of measure '" + m.name +
                             "' has no ball or concave quadratic constraint certifying compactness");
    }
  }

  auto to_row = [&](const MomentConstraint& c) {
    std::map<std::size_t, double> acc;
    for (const auto& t : c.terms) {
      const int i = h.measure_index(t.measure);
      if (t.poly.degree() > 2 * r) {
        throw std::invalid_argument("constraint '" + c.label + "' has degree " + std::to_string(t.poly.degree()) +
                                    " on measure '" + t.measure + "', above 2r = " + std::to_string(2 * r));
      }
      for (const auto& [j, a] : builder.riesz_row(groups[i], t.poly).terms) acc[j] += a;
    }
    LinearRow row;
    for (const auto& [j, a] : acc)
      if (a != 0.0) row.terms.emplace_back(j, a);
    row.rhs = c.rhs;
    return row;
  };
  for (const auto& c : h.constraints) builder.add_row(to_row(c), c.relation);
  for (const auto& fam : h.liouville) {
    for (auto& row : piecewise_liouville(fam, h, r, &out.warnings)) {
      builder.add_row(to_row(row), row.relation);
      out.generated.push_back(std::move(row));
    }
  }
  for (std::size_t i = 0; i < h.measures.size(); ++i) {
    for (const auto& q : h.measures[i].support.equalities)
      builder.add_equality_localizer(groups[i], q);
  }
  const double weight = h.sense == Sense::kMinimize ? 1.0 : -1.0;
  for (const auto& t : h.objective) {
    if (t.poly.degree() > 2 * r) {
      throw std::invalid_argument("objective has degree " + std::to_string(t.poly.degree()) + " on measure '" +
                                  t.measure + "', above 2r = " + std::to_string(2 * r));
    }
    builder.add_objective(groups[h.measure_index(t.measure)], t.poly, weight);
  }
  out.block_sizes = builder.psd_sides();
  out.program = builder.build();
  return out;
}

GMPResult solve_gmp(const GMPProblem& g, int r, const SolveOptions& options) {
  GMPResult res;
  res.relaxation = build_gmp_relaxation(g, r);
  res.solution = solve(res.relaxation.program, options);
  res.status = res.solution.status;
  const double value = -res.solution.dual_obj;
  res.bound = (g.sense == Sense::kMinimize ? value : -value) + g.objective_offset;
  for (const auto& m : res.relaxation.measures) {
    const Eigen::VectorXd y =
        res.solution.y.segment(static_cast<Eigen::Index>(m.offset), static_cast<Eigen::Index>(m.size));
    MomentVector mv(m.nvars, 2 * r, y);
    if (auto it = res.relaxation.time_scale.find(m.name); it != res.relaxation.time_scale.end())
      mv = unscale_time(mv, it->second.time_index, it->second.horizon);
    res.moments.emplace(m.name, std::move(mv));
  }
  if (g.tie_break.empty() || res.status != SolveStatus::kOptimal) return res;

  GMPProblem h = g;
  const bool minimize = g.sense == Sense::kMinimize;
  MomentConstraint level{g.objective, value + g.tie_break_slack * (1.0 + std::abs(value)), Relation::kLe,
                         "objective level"};
  if (!minimize) level.rhs = -value - g.tie_break_slack * (1.0 + std::abs(value));
  if (!minimize) level.relation = Relation::kGe;
  h.constraints.push_back(std::move(level));
  h.objective = g.tie_break;
  h.sense = Sense::kMinimize;
  h.objective_offset = 0.0;
  h.tie_break.clear();
  GMPResult second = solve_gmp(h, r, options);
  if (second.status != SolveStatus::kOptimal) {
    res.relaxation.warnings.push_back("tie-break solve ended with status " + to_string(second.status));
    return res;
  }
  res.moments = std::move(second.moments);
  res.solution = std::move(second.solution);
  res.relaxation.warnings.insert(res.relaxation.warnings.end(), second.relaxation.warnings.begin(),
                                 second.relaxation.warnings.end());
  return res;
}

GMPProblem gmp_from_pop(const POPProblem& pop) {
  GMPProblem g;
  g.measures.push_back({"mu", pop.feasible_set});
  const int n = pop.feasible_set.space.size();
  g.constraints.push_back({{{"mu", Polynomial(n, Coefficient(1))}}, 1.0, Relation::kEq, "mass"});
  g.objective.push_back({"mu", pop.objective});
  return g;
}

double constraint_residual(const MomentConstraint& c, const std::map<std::string, MomentVector>& moments) {
  double lhs = 0.0;
  for (const auto& t : c.terms) {
    auto it = moments.find(t.measure);
    if (it == moments.end()) throw std::invalid_argument("no moments for measure '" + t.measure + "'");
    lhs += riesz_apply(t.poly, it->second);
  }
  return lhs - c.rhs;
}

std::string to_string(const MomentConstraint& c, const GMPProblem& context) {
  std::string out = c.label.empty() ? "" : c.label + ": ";
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    const auto& t = c.terms[i];
    const auto& m = context.measures[context.measure_index(t.measure)];
    out += (i ? " + " : "") + std::string("<") + t.poly.to_string(m.space()) + ", " + t.measure + ">";
  }
  if (c.terms.empty()) out += "0";
  return out + " " + to_string(c.relation) + " " + format_number(c.rhs);
}

}  // namespace momentlmi
