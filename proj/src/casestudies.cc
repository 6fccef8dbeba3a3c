#include "momentlmi/casestudies.h"

#include <stdexcept>
#include <string>

namespace momentlmi {
namespace {

Coefficient exact(double v) { return Coefficient(mpq_class(v)); }

MeasureDecl measure(std::string name, const VarSpace& space, std::vector<Polynomial> inequalities) {
  SemialgebraicSet set;
  set.space = space;
  set.inequalities = std::move(inequalities);
  return {std::move(name), std::move(set)};
}

Eigen::VectorXd point(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

using Matrix = std::vector<std::vector<Coefficient>>;

Coefficient determinant(Matrix a) {
  const int n = static_cast<int>(a.size());
  Coefficient det = 1;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    while (pivot < n && a[pivot][c].is_zero()) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      std::swap(a[pivot], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (a[r][c].is_zero()) continue;
      const Coefficient f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

Matrix inverse(const Matrix& m) {
  const int n = static_cast<int>(m.size());
  Matrix a(n, std::vector<Coefficient>(2 * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    while (pivot < n && a[pivot][c].is_zero()) ++pivot;
    if (pivot == n) throw std::invalid_argument("singular matrix");
    std::swap(a[pivot], a[c]);
    const Coefficient d = a[c][c];
    for (auto& v : a[c]) v /= d;
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      const Coefficient f = a[r][c];
      for (int k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  Matrix out(n, std::vector<Coefficient>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = a[i][n + j];
  return out;
}

}  // namespace

ConicProgram build_irrat1() {
  ConicProgram p;
  p.blocks = {{BlockKind::kPsd, 2}};
  p.C.add(0, 0, 0, 1.0);
  p.C.add(0, 1, 1, 2.0);
  SparseBlockMatrix a;
  a.add(0, 0, 1, -1.0);
  p.A = {a};
  p.b = Eigen::VectorXd::Ones(1);
  return p;
}

ConicProgram build_irrat2() {
  ConicProgram p;
  p.blocks = {{BlockKind::kPsd, 2}, {BlockKind::kPsd, 2}};
  p.C.add(0, 0, 0, 1.0);
  p.C.add(0, 1, 1, 2.0);
  p.C.add(1, 0, 1, 2.0);
  SparseBlockMatrix a;
  a.add(0, 0, 1, -1.0);
  a.add(1, 0, 0, -2.0);
  a.add(1, 1, 1, -1.0);
  p.A = {a};
  p.b = Eigen::VectorXd::Ones(1);
  return p;
}

Pencil build_pillow() {
  Pencil p(3, 3);
  for (int i = 0; i < 3; ++i) p.set(0, i, i, 1);
  p.set(1, 0, 1, 1);
  p.set(2, 0, 2, 1);
  p.set(3, 1, 2, 1);
  return p;
}

Pencil build_exponential(int m) {
  if (m < 1) throw std::invalid_argument("the exponential spectrahedron needs m >= 1");
  std::vector<Pencil> blocks;
  for (int k = 0; k < m; ++k) {
    Pencil b(m, 2);
    b.set(0, 0, 0, 1);
    if (k == 0) {
      b.set(0, 0, 1, 2);
    } else {
      b.set(k, 0, 1, 1);
    }
    b.set(k + 1, 1, 1, 1);
    blocks.push_back(std::move(b));
  }
  return Pencil::BlockDiagonal(blocks);
}

POPProblem build_polyopt() {
  POPProblem pop;
  pop.feasible_set.space = VarSpace::Numbered(2);
  const VarSpace& s = pop.feasible_set.space;
  pop.objective = parse_polynomial("-x2", s);
  for (const char* text : {"3 + 2*x2 - x1^2 - x2^2", "-x1 - x2 - x1*x2", "1 + x1*x2"})
    pop.feasible_set.inequalities.push_back(parse_polynomial(text, s));
  return pop;
}

Coefficient eig_assign_rate(int k) { return Coefficient::Rational(1, 4L * k * k - 1); }

std::vector<std::vector<Coefficient>> eig_assign_matrix(int n) {
  Matrix B(n, std::vector<Coefficient>(n));
  for (int i = 0; i < n; ++i) {
    B[i][i] = 2;
    if (i + 1 < n) B[i][i + 1] = B[i + 1][i] = -1;
  }
  B[n - 1][n - 1] = Coefficient::Rational(n + 1, n);
  return B;
}

std::vector<Polynomial> eig_assign_system(int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("eigenvalue assignment needs 1 <= n <= 16");
  const Matrix Binv = inverse(eig_assign_matrix(n));
  // e_k of the rates, by expanding prod (1 + a_j z).
  std::vector<Coefficient> e(n + 1);
  e[0] = 1;
  for (int j = 1; j <= n; ++j) {
    const Coefficient a = eig_assign_rate(j);
    for (int k = j; k >= 1; --k) e[k] += a * e[k - 1];
  }
  // The k x k principal minor of B^-1 diag x on the index set I is
  // det(B^-1 restricted to I) times prod_{i in I} x_i.
  std::vector<Polynomial> p(n, Polynomial(n));
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    std::vector<int> powers(n, 0);
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        idx.push_back(i);
        powers[i] = 1;
      }
    }
    Matrix sub(idx.size(), std::vector<Coefficient>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) sub[a][b] = Binv[idx[a]][idx[b]];
    p[idx.size() - 1].add_term(Exponent(powers), determinant(sub));
  }
  for (int k = 1; k <= n; ++k) p[k - 1] -= Polynomial(n, e[k]);
  return p;
}

POPProblem build_eig_assign(int n) {
  if (n < 2 || n > 8) throw std::invalid_argument("eigenvalue assignment is provided for 2 <= n <= 8");
  POPProblem pop;
  pop.feasible_set.space = VarSpace::Numbered(n);
  pop.feasible_set.equalities = eig_assign_system(n);
  pop.feasible_set.ball_radius = 1.0;
  pop.objective = Polynomial(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Polynomial d = Polynomial::Variable(n, i) - Polynomial::Variable(n, j);
      pop.objective += d * d;
    }
  }
  return pop;
}

GMPProblem build_lqr() {
  const VarSpace xu({"x", "u"});
  GMPProblem g;
  g.measures = {measure("mu", xu, {})};
  DynamicsSpec dyn;
  dyn.states = {"x"};
  dyn.controls = {"u"};
  dyn.f = {parse_polynomial("u", xu)};
  dyn.lagrangian = parse_polynomial("x^2 + u^2", xu);
  LiouvilleFamily family{{{dyn, "mu"}}, Endpoint::Fixed(point({1.0})), Endpoint::Fixed(point({0.0}))};
  add_control_objective(family, &g);
  g.liouville.push_back(std::move(family));
  return g;
}

GMPProblem build_occtraj() {
  const VarSpace x({"x"});
  GMPProblem g;
  g.measures = {measure("mu", x, {parse_polynomial("4 - x^2", x)}),
                measure("mu0", x, {parse_polynomial("1/4 - (x - 3/2)^2", x)}),
                measure("muT", x, {parse_polynomial("1/4 - x^2", x)})};
  g.constraints.push_back({{{"mu0", Polynomial(1, 1)}}, 1.0, Relation::kEq, "mass mu0"});
  DynamicsSpec dyn;
  dyn.states = {"x"};
  dyn.f = {parse_polynomial("-x", x)};
  g.liouville.push_back({{{dyn, "mu"}}, Endpoint::Measure("mu0"), Endpoint::Measure("muT")});
  g.objective = {{"mu", parse_polynomial("x^2", x)}};
  // The trajectory may idle at the equilibrium x = 0 for free, so only the
  // least-mass optimum is the trajectory itself.
  g.tie_break = {{"mu", Polynomial(1, 1)}};
  return g;
}

GMPProblem build_bolza() {
  const VarSpace txu({"t", "x", "u"});
  GMPProblem g;
  g.measures = {measure("mu", txu,
                        {parse_polynomial("t*(1 - t)", txu), parse_polynomial("1 - u^2", txu),
                         parse_polynomial("1 - x^2", txu)})};
  DynamicsSpec dyn;
  dyn.time = "t";
  dyn.states = {"x"};
  dyn.controls = {"u"};
  dyn.f = {parse_polynomial("u", txu)};
  dyn.lagrangian = parse_polynomial("x^4 + (u^2 - 1)^2", txu);
  dyn.horizon = 1.0;
  LiouvilleFamily family{{{dyn, "mu"}}, Endpoint::Fixed(point({0.0})), Endpoint::Fixed(point({0.0}))};
  add_control_objective(family, &g);
  g.liouville.push_back(std::move(family));
  return g;
}

SaturationSpec SaturationSpec::Launcher() {
  SaturationSpec s;
  s.inertia = 27500;
  s.kp = 2475;
  s.kd = 19800;
  s.limit = 380;
  s.horizon = 50;
  s.x0.reset();
  s.theta_max = 50;
  s.omega_max = 5;
  // The cells must hold every trajectory leaving the initial box.
  s.radius2 = 50.0 * 50.0 + 5.0 * 5.0;
  s.terminal_radius2 = 1e-5;
  return s;
}

GMPProblem build_saturation_cells(const SaturationSpec& spec) {
  // Cells live on (t, theta, omega); the endpoint measures on the state.
  const VarSpace txw({"t", "theta", "omega"});
  const VarSpace xw({"theta", "omega"});
  const Polynomial t = Polynomial::Variable(3, 0);
  const Polynomial theta = Polynomial::Variable(3, 1);
  const Polynomial omega = Polynomial::Variable(3, 2);
  const Polynomial one(3, 1);
  // y = -(kp theta + kd omega) / L is the unsaturated torque over L.
  const Polynomial y = theta * exact(-spec.kp / spec.limit) + omega * exact(-spec.kd / spec.limit);
  const Polynomial ball = Polynomial(3, exact(spec.radius2)) - theta * theta - omega * omega;
  const Polynomial clock = t * (Polynomial(3, exact(spec.horizon)) - t);
  const Coefficient gain = exact(spec.limit / spec.inertia);

  GMPProblem g;
  g.measures = {measure("linear", txw, {clock, one - y * y, ball}), measure("upper", txw, {clock, y - one, ball}),
                measure("lower", txw, {clock, -y - one, ball})};
  const Polynomial th = Polynomial::Variable(2, 0);
  const Polynomial om = Polynomial::Variable(2, 1);
  g.measures.push_back(measure("muT", xw, {Polynomial(2, exact(spec.terminal_radius2)) - th * th - om * om}));

  DynamicsSpec base;
  base.time = "t";
  base.states = {"theta", "omega"};
  base.horizon = spec.horizon;
  LiouvilleFamily family;
  for (const auto& [name, torque] :
       std::vector<std::pair<std::string, Polynomial>>{{"linear", y}, {"upper", one}, {"lower", -one}}) {
    DynamicsSpec d = base;
    d.f = {omega, torque * gain};
    family.cells.push_back({d, name});
  }
  if (spec.x0) {
    family.initial = Endpoint::Fixed(point({(*spec.x0)(0), (*spec.x0)(1)}));
  } else {
    g.measures.push_back(measure("mu0", xw,
                                 {Polynomial(2, exact(spec.theta_max * spec.theta_max)) - th * th,
                                  Polynomial(2, exact(spec.omega_max * spec.omega_max)) - om * om}));
    g.constraints.push_back({{{"mu0", Polynomial(2, 1)}}, 1.0, Relation::kEq, "mass mu0"});
    family.initial = Endpoint::Measure("mu0");
  }
  family.terminal = Endpoint::Measure("muT");
  g.liouville.push_back(std::move(family));
  g.objective = {{"muT", th * th + om * om}};
  g.sense = Sense::kMaximize;
  return g;
}

}  // namespace momentlmi
