// Command-line front end: solve problem files, draw shadows of their
// feasible sets and print generated Liouville rows.
//
// Exit codes: 0 when every solve is optimal, 2 when a solver did not
// converge, 1 on input errors.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "momentlmi/extract.h"
#include "momentlmi/gmp.h"
#include "momentlmi/problem_file.h"
#include "momentlmi/relaxation.h"
#include "momentlmi/sdp_solver.h"
#include "momentlmi/spectra.h"

namespace momentlmi {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

/// Raised for command-line or file content the subcommand cannot use.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string nums(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + num(v(i));
  return out;
}

/// Accumulates `key = value` lines and an optional moment table.
class Report {
 public:
  void add(const std::string& key, const std::string& value) { lines_ << key << " = " << value << "\n"; }
  void add(const std::string& key, double value) { add(key, num(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  void table_header(const std::string& header) { table_ << header << "\n"; }
  void table_row(const std::string& row) { table_ << row << "\n"; }

  std::string text() const {
    std::string t = table_.str();
    return lines_.str() + (t.empty() ? "" : "\n" + t);
  }

 private:
  std::ostringstream lines_;
  std::ostringstream table_;
};

void emit(const Report& report, const std::string& out_path) {
  const std::string text = report.text();
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write '" + out_path + "'");
    out << text;
  }
}

void add_solver(Report& r, const SDPSolution& s) {
  r.add("status", to_string(s.status));
  r.add("iterations", s.iterations);
  r.add("gap", s.gap);
  r.add("primal_objective", s.primal_obj);
  r.add("dual_objective", s.dual_obj);
  r.add("primal_residual", s.primal_residual);
  r.add("dual_residual", s.dual_residual);
}

void add_certificate(Report& r, const std::string& prefix, const Certificate& c) {
  r.add(prefix + "order", c.order);
  r.add(prefix + "r_X", c.r_X);
  r.add(prefix + "rank_tol", c.tol);
  std::string ranks;
  for (std::size_t i = 0; i < c.ranks.size(); ++i) ranks += (i ? " " : "") + std::to_string(c.ranks[i]);
  r.add(prefix + "ranks", ranks);
  r.add(prefix + "flat", c.flat);
  r.add(prefix + "atoms", static_cast<int>(c.atoms.size()));
  for (std::size_t k = 0; k < c.atoms.size(); ++k) {
    r.add(prefix + "atom" + std::to_string(k + 1), nums(c.atoms[k].point));
    r.add(prefix + "weight" + std::to_string(k + 1), c.atoms[k].weight);
  }
  if (!c.atoms.empty()) {
    r.add(prefix + "constraint_residual", c.residual);
    r.add(prefix + "moment_residual", c.moment_residual);
  }
  if (!c.extraction_error.empty()) r.add(prefix + "extraction_error", c.extraction_error);
}

void add_moments(Report& r, const std::string& measure, const MomentVector& y) {
  const auto alphas = monomials_up_to(y.nvars(), y.degree());
  for (std::size_t k = 0; k < alphas.size(); ++k)
    r.table_row((measure.empty() ? "" : measure + " ") + alphas[k].to_string() + " " + num(y[k]));
}

SolveOptions solver_options(double tol, int max_iter) {
  SolveOptions o;
  o.gap_tol = tol;
  o.feas_tol = tol;
  o.max_iter = max_iter;
  return o;
}

int ceil_half(int d) { return (d + 1) / 2; }

/// Smallest order at which every support, constraint and objective term
/// fits the truncation.
int gmp_minimal_order(const GMPProblem& g) {
  int r = 1;
  for (const auto& m : g.measures) r = std::max(r, set_order(m.support));
  for (const auto& c : g.constraints)
    for (const auto& t : c.terms) r = std::max(r, ceil_half(t.poly.degree()));
  for (const auto& t : g.objective) r = std::max(r, ceil_half(t.poly.degree()));
  return r;
}

// The feasible set the shadow of a file refers to.
SemialgebraicSet shadow_set(const ProblemFile& f) {
  switch (f.kind) {
    case ProblemKind::kPop:
      return f.pop.feasible_set;
    case ProblemKind::kPencil: {
      // F(x) is psd exactly when every defining polynomial is nonnegative.
      SemialgebraicSet s;
      s.space = f.pencil_space;
      s.inequalities = defining_polynomials(*f.pencil);
      return s;
    }
    default:
      throw InputError("shadow needs a pop or pencil file, got kind " + to_string(f.kind));
  }
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string file;
  std::optional<int> order;
  double tol = 1e-9;
  int max_iter = 200;
  bool extract = false;
  std::string out;
  unsigned seed = 0;
};

int cmd_solve(const SolveArgs& a) {
  const ProblemFile f = read_problem_file(a.file);
  const SolveOptions options = solver_options(a.tol, a.max_iter);
  ExtractOptions extract;
  extract.seed = a.seed;
  Report r;
  r.add("kind", to_string(f.kind));
  if (!f.name.empty()) r.add("name", f.name);
  bool optimal = true;

  switch (f.kind) {
    case ProblemKind::kPop: {
      const int order = a.order ? *a.order : f.order.value_or(minimal_order(f.pop));
      const auto res = bound_and_moments(f.pop, order, options);
      r.add("order", order);
      r.add("r_X", res.info.r_X);
      r.add("bound", res.bound);
      add_solver(r, res.solution);
      optimal = res.status == SolveStatus::kOptimal;
      if (a.extract && optimal)
        add_certificate(r, "certificate.", certify(res.moments, order, res.info.r_X, &f.pop.feasible_set, extract));
      r.table_header("alpha y[alpha]");
      add_moments(r, "", res.moments);
      break;
    }
    case ProblemKind::kGmp: {
      const int order = a.order ? *a.order : f.order.value_or(gmp_minimal_order(f.gmp));
      const auto res = solve_gmp(f.gmp, order, options);
      r.add("order", order);
      r.add("sense", std::string(f.gmp.sense == Sense::kMinimize ? "minimize" : "maximize"));
      r.add("bound", res.bound);
      add_solver(r, res.solution);
      for (const auto& w : res.relaxation.warnings) r.add("warning", w);
      optimal = res.status == SolveStatus::kOptimal;
      r.table_header("measure alpha y[alpha]");
      for (const auto& m : f.gmp.measures) {
        const auto it = res.moments.find(m.name);
        if (it == res.moments.end()) continue;
        const MomentVector& y = it->second;
        r.add("mass." + m.name, y.mass());
        if (a.extract && optimal) {
          const Certificate c = certify(y, order, set_order(m.support), &m.support, extract);
          add_certificate(r, m.name + ".certificate.", c);
        }
        add_moments(r, m.name, y);
      }
      break;
    }
    case ProblemKind::kSdp: {
      const SDPSolution s = solve(f.sdp, options);
      r.add("bound", s.dual_obj);
      add_solver(r, s);
      optimal = s.status == SolveStatus::kOptimal;
      r.add("y", nums(s.y));
      for (std::size_t k = 0; k < s.X.size(); ++k)
        r.add("X" + std::to_string(k + 1), nums(s.X[k].reshaped<Eigen::RowMajor>()));
      break;
    }
    case ProblemKind::kPencil: {
      const Pencil& p = *f.pencil;
      r.add("size", p.m());
      const auto polys = defining_polynomials(p);
      for (std::size_t k = 0; k < polys.size(); ++k) r.add("f" + std::to_string(k + 1), polys[k].to_string(f.pencil_space));
      for (std::size_t i = 0; i < f.points.size(); ++i) {
        const auto& x = f.points[i];
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
        const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p.evaluate(xs)).eigenvalues();
        const std::string key = "point" + std::to_string(i + 1);
        r.add(key, nums(x));
        r.add(key + ".min_eigenvalue", eig(0));
        r.add(key + ".member", membership(p, xs));
      }
      break;
    }
  }
  emit(r, a.out);
  return optimal ? kExitOk : kExitNotConverged;
}

struct ShadowArgs {
  std::string file;
  std::optional<int> order;
  int directions = 64;
  std::string proj = "1,2";
  std::string out;
};

std::pair<int, int> parse_projection(const std::string& text, int n) {
  int i = 0, j = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> i >> comma >> j) || comma != ',' || !in.eof())
    throw InputError("--proj expects two 1-based indices 'i,j', got '" + text + "'");
  if (i < 1 || j < 1 || i > n || j > n || i == j)
    throw InputError("--proj indices must be distinct and within 1.." + std::to_string(n));
  return {i - 1, j - 1};
}

int cmd_shadow(const ShadowArgs& a) {
  const ProblemFile f = read_problem_file(a.file);
  const SemialgebraicSet set = shadow_set(f);
  const auto proj = parse_projection(a.proj, set.space.size());
  if (a.directions < 3) throw InputError("--directions must be at least 3");
  const int order = a.order ? *a.order : f.order.value_or(set_order(set));
  ShadowOptions options;
  options.threads = 0;
  const auto points = shadow_support_points(set, order, evenly_spaced_directions(a.directions), proj, options);

  Report r;
  r.add("kind", to_string(f.kind));
  if (!f.name.empty()) r.add("name", f.name);
  r.add("order", order);
  r.add("directions", a.directions);
  r.add("proj", set.space.name(proj.first) + " " + set.space.name(proj.second));
  int failed = 0;
  for (const auto& p : points) failed += p.status != SolveStatus::kOptimal;
  r.add("status", std::string(failed ? "nonconverged" : "optimal"));
  if (failed) r.add("nonconverged_directions", failed);
  r.table_header("cx cy sx sy value");
  for (const auto& p : points) {
    r.table_row(num(p.direction(0)) + " " + num(p.direction(1)) + " " + num(p.point(0)) + " " + num(p.point(1)) +
                " " + num(p.value));
  }
  emit(r, a.out);
  return failed ? kExitNotConverged : kExitOk;
}

struct LiouvilleArgs {
  std::string file;
  std::optional<int> order;
  std::string out;
};

int cmd_liouville(const LiouvilleArgs& a) {
  const ProblemFile f = read_problem_file(a.file);
  if (f.kind != ProblemKind::kGmp || f.gmp.liouville.empty())
    throw InputError("'" + a.file + "' declares no dynamics (no [liouville] section)");
  const int order = a.order ? *a.order : f.order.value_or(gmp_minimal_order(f.gmp));
  if (order < 1) throw OrderError("relaxation order " + std::to_string(order) + " is below 1", 1);
  Report r;
  r.add("kind", to_string(f.kind));
  if (!f.name.empty()) r.add("name", f.name);
  r.add("order", order);
  int count = 0;
  for (std::size_t k = 0; k < f.gmp.liouville.size(); ++k) {
    std::vector<std::string> notes;
    const auto rows = piecewise_liouville(f.gmp.liouville[k], f.gmp, order, &notes);
    for (const auto& n : notes) r.add("note", n);
    for (const auto& row : rows) {
      r.add("row" + std::to_string(++count), to_string(row, f.gmp));
    }
  }
  r.add("rows", count);
  emit(r, a.out);
  return kExitOk;
}

}  // namespace
}  // namespace momentlmi

int main(int argc, char** argv) {
  using namespace momentlmi;
  CLI::App app{"Moment relaxations for polynomial and measure optimization"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file and report bound, status and moments");
  solve_cmd->add_option("file", solve_args.file, "Problem file")->required();
  solve_cmd->add_option("--order", solve_args.order, "Relaxation order (default: the file's, else the minimal)");
  solve_cmd->add_option("--tol", solve_args.tol, "Gap and feasibility tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "Interior-point iteration limit")->capture_default_str();
  solve_cmd->add_flag("--extract", solve_args.extract, "Check flatness and extract atoms");
  solve_cmd->add_option("--out", solve_args.out, "Also write the report here");
  solve_cmd->add_option("--seed", solve_args.seed, "Seed of the random combination used in extraction")
      ->capture_default_str();

  ShadowArgs shadow_args;
  auto* shadow_cmd = app.add_subcommand("shadow", "Support points of the order-r shadow of the feasible set");
  shadow_cmd->add_option("file", shadow_args.file, "Problem file (pop or pencil)")->required();
  shadow_cmd->add_option("--order", shadow_args.order, "Relaxation order (default: the file's, else r_X)");
  shadow_cmd->add_option("--directions", shadow_args.directions, "Number of directions")->capture_default_str();
  shadow_cmd->add_option("--proj", shadow_args.proj, "Projected coordinates, 1-based 'i,j'")->capture_default_str();
  shadow_cmd->add_option("--out", shadow_args.out, "Also write the table here");

  LiouvilleArgs liouville_args;
  auto* liouville_cmd = app.add_subcommand("liouville", "Print the Liouville rows generated at an order");
  liouville_cmd->add_option("file", liouville_args.file, "GMP problem file with a [liouville] section")->required();
  liouville_cmd->add_option("--order", liouville_args.order, "Relaxation order (default: the file's, else minimal)");
  liouville_cmd->add_option("--out", liouville_args.out, "Also write the rows here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args);
    if (*shadow_cmd) return cmd_shadow(shadow_args);
    return cmd_liouville(liouville_args);
  } catch (const ProblemParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const OrderError& e) {
    std::cerr << "error: " << e.what() << " (use --order " << e.minimal_order() << " or higher)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitInput;
}
