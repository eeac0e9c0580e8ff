#include "rgvi/problems.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "rgvi/errors.hpp"
#include "rgvi/game_lp.hpp"
#include "rgvi/sampling.hpp"

namespace rgvi {

const char* to_string(ProblemClass c) {
  return c == ProblemClass::minimization ? "minimization" : "variational_inequality";
}

double ProblemInstance::objective(const Vector& x) const {
  const auto f = op->potential(x);
  if (!f) throw Unsupported("objective: operator " + op->describe() + " has no potential");
  return *f + psi.value(x);
}

void ProblemInstance::validate(int samples, std::uint64_t seed) const {
  if (!op) throw InvalidInput(name + ": missing operator");
  const Index n = dim();
  if (psi.dim() != n || metric.dim() != n || x0.size() != n)
    throw InvalidInput(name + ": dimension mismatch between operator, psi, metric and x0");
  if (!psi.in_domain(x0, 1e-9)) throw InvalidInput(name + ": x0 outside dom psi");
  Rng rng(seed);
  const Vector around = x_star.value_or(x0);
  const SimpleSet& dom = psi.domain();

  for (int k = 0; k < samples; ++k) {
    const Vector x = sample_point(dom, rng, around);
    const Vector y = sample_point(dom, rng, around);
    const Vector vx = op->value(x);
    const double mono = (vx - op->value(y)).dot(x - y);
    if (mono < -1e-10 * std::max(1.0, vx.norm() * (x - y).norm()))
      throw InvalidInput(name + ": operator fails sampled monotonicity check");

    if (op->order_cap() >= 1) {
      Vector h = random_normal(n, rng);
      h.normalize();
      const double eps = 1e-6 * (1.0 + x.norm());
      const Vector fd = (op->value(x + eps * h) - op->value(x - eps * h)) / (2.0 * eps);
      const Vector jh = op->jacobian(x) * h;
      if ((fd - jh).norm() > 1e-5 * std::max(1.0, jh.norm()))
        throw InvalidInput(name + ": Jacobian disagrees with finite differences");
    }

    const double lam = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double mid = psi.value(lam * x + (1.0 - lam) * y, 1e-8);
    if (mid > lam * psi.value(x) + (1.0 - lam) * psi.value(y) + 1e-10)
      throw InvalidInput(name + ": psi fails sampled convexity check");

    if (x_star) {
      const double res = op->value(*x_star).dot(x - *x_star) + psi.value(x) - psi.value(*x_star, 1e-8);
      if (res < -1e-8) throw InvalidInput(name + ": x* violates the strong CVI on a sampled point");
    }
  }
  if (x_star && !psi.in_domain(*x_star, 1e-8)) throw InvalidInput(name + ": x* outside dom psi");
}

namespace {

void set_radii(ProblemInstance& inst) {
  const SimpleSet& dom = inst.psi.domain();
  if (!dom.bounded()) return;
  const double scale = std::sqrt(inst.metric.max_eigenvalue());
  inst.R0 = scale * dom.max_distance(inst.x0);
  if (inst.x_star) inst.D = scale * dom.max_distance(*inst.x_star);
}

Matrix skew_block(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix c = Matrix::Zero(n + m, n + m);
  c.block(0, n, n, m) = a.transpose();
  c.block(n, 0, m, n) = -a;
  return c;
}

SimpleSet game_domain(Index m, Index n) {
  return SimpleSet::product({SimpleSet::simplex(n), SimpleSet::simplex(m)});
}

Vector pure_start(Index m, Index n) {
  Vector z = Vector::Zero(n + m);
  z(0) = 1.0;
  z(n) = 1.0;
  return z;
}

// Solves min 0.5<Qx,x> - <c,x> + psi(x) for SPD Q by restarted FISTA.
Vector solve_quadratic(const Matrix& q, const Vector& c, const CompositeTerm& psi) {
  if (psi.kind() == CompositeKind::zero) return q.ldlt().solve(c);
  Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
  const double lip = es.eigenvalues().maxCoeff();
  const double step = 1.0 / lip;
  Vector x = psi.euclidean_prox(Vector::Zero(c.size()), step);
  Vector y = x;
  double t = 1.0;
  const double scale = 1.0 + c.norm();
  for (int it = 0; it < 200000; ++it) {
    const Vector next = psi.euclidean_prox(y - step * (q * y - c), step);
    const Vector check = psi.euclidean_prox(next - step * (q * next - c), step);
    if ((check - next).norm() * lip <= 1e-15 * scale) return check;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if ((next - x).dot(y - next) > 0.0) {
      y = next;
      t = 1.0;
    } else {
      y = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x = next;
  }
  return x;
}

}  // namespace

ProblemInstance make_bilinear_game(const Matrix& a) {
  if (a.size() == 0) throw InvalidInput("make_bilinear_game: empty matrix");
  if (!a.allFinite()) throw InvalidInput("make_bilinear_game: non-finite entries");
  const Index m = a.rows();
  const Index n = a.cols();
  const GameSolution sol = solve_matrix_game(a);

  ProblemInstance inst;
  inst.name = "bilinear_game_" + std::to_string(m) + "x" + std::to_string(n);
  inst.problem_class = ProblemClass::variational_inequality;
  inst.op = std::make_shared<AffineOperator>(skew_block(a), Vector::Zero(n + m));
  inst.psi = CompositeTerm::indicator(game_domain(m, n));
  inst.metric = Metric::identity(n + m);
  inst.x0 = pure_start(m, n);
  Vector zs(n + m);
  zs << sol.x, sol.y;
  inst.x_star = zs;
  inst.game_matrix = a;
  set_radii(inst);
  inst.validate();
  return inst;
}

ProblemInstance make_matching_pennies() {
  Matrix a(2, 2);
  a << 1.0, -1.0, -1.0, 1.0;
  ProblemInstance inst = make_bilinear_game(a);
  inst.name = "matching_pennies";
  inst.x_star = Vector::Constant(4, 0.5);
  set_radii(inst);
  return inst;
}

ProblemInstance make_random_bilinear_game(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInput("make_random_bilinear_game: empty matrix");
  Rng rng(seed);
  return make_bilinear_game(random_uniform_matrix(m, n, -1.0, 1.0, rng));
}

ProblemInstance make_chained_cubic(Index n) {
  if (n < 1) throw InvalidInput("make_chained_cubic: n must be >= 1");
  ProblemInstance inst;
  inst.name = "chained_cubic_" + std::to_string(n);
  inst.problem_class = ProblemClass::minimization;
  inst.op = std::make_shared<ChainedCubicGradient>(n);
  inst.psi = CompositeTerm::zero(n);
  inst.metric = Metric::identity(n);
  inst.x0 = Vector::Ones(n);
  inst.x_star = Vector::Zero(n);
  inst.f_star = 0.0;
  inst.validate();
  return inst;
}

ProblemInstance make_strongly_monotone_affine(Index n, double mu, double lipschitz, std::uint64_t seed,
                                              SetKind domain) {
  if (n < 1) throw InvalidInput("make_strongly_monotone_affine: n must be >= 1");
  if (!(mu >= 0.0) || !(lipschitz > 0.0)) throw InvalidInput("make_strongly_monotone_affine: need 0 <= mu, L > 0");
  if (mu > lipschitz) throw InvalidInput("make_strongly_monotone_affine: mu > L");
  Rng rng(seed);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) g.col(j) = random_normal(n, rng);
  Matrix s = g - g.transpose();
  const double target = std::sqrt(std::max(0.0, lipschitz * lipschitz - mu * mu));
  const double sn = spectral_norm(s);
  s = sn > 0.0 ? Matrix(s * (target / sn)) : Matrix::Zero(n, n);
  const Matrix a = s + mu * Matrix::Identity(n, n);

  SimpleSet set;
  Vector xs;
  switch (domain) {
    case SetKind::whole_space:
      set = SimpleSet::whole_space(n);
      xs = random_normal(n, rng);
      break;
    case SetKind::box:
      set = SimpleSet::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
      xs = random_uniform(n, -0.5, 0.5, rng);
      break;
    case SetKind::ball:
      set = SimpleSet::ball(Vector::Zero(n), 1.0);
      xs = random_normal(n, rng);
      xs *= 0.5 / xs.norm();
      break;
    case SetKind::simplex: {
      set = SimpleSet::simplex(n);
      xs = random_uniform(n, 0.5, 1.5, rng);
      xs /= xs.sum();
      break;
    }
  }
  // On the simplex x* is relatively interior: V(x*) = 0 keeps it a solution.
  ProblemInstance inst;
  inst.name = "strongly_monotone_affine_" + std::to_string(n);
  inst.problem_class = ProblemClass::variational_inequality;
  auto op = std::make_shared<AffineOperator>(a, -a * xs);
  op->constants().derivative_bound[1] = lipschitz;
  op->constants().uniform_monotone[2] = mu;
  inst.op = op;
  inst.psi = CompositeTerm::indicator(set);
  inst.metric = Metric::identity(n);
  if (domain == SetKind::whole_space) {
    Vector dir = random_normal(n, rng);
    inst.x0 = xs + dir / dir.norm();
  } else {
    inst.x0 = sample_point(set, rng, xs);
  }
  inst.x_star = xs;
  set_radii(inst);
  inst.validate();
  return inst;
}

ProblemInstance make_quadratic(const Matrix& q, const Vector& c, CompositeTerm psi) {
  const Index n = q.rows();
  if (q.cols() != n || c.size() != n || psi.dim() != n) throw InvalidInput("make_quadratic: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (q + q.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) throw InvalidInput("make_quadratic: Q must be positive definite");

  ProblemInstance inst;
  inst.name = "quadratic_" + std::string(to_string(psi.kind()));
  inst.problem_class = ProblemClass::minimization;
  auto op = std::make_shared<AffineOperator>(0.5 * (q + q.transpose()), -c);
  op->constants().uniform_monotone[2] = es.eigenvalues().minCoeff();
  inst.op = op;
  inst.psi = std::move(psi);
  inst.metric = Metric::identity(n);
  const Vector xs = solve_quadratic(inst.op->affine()->a, c, inst.psi);
  inst.x_star = xs;
  inst.f_star = inst.objective(xs);
  inst.x0 = inst.psi.domain().project(Vector::Zero(n));
  set_radii(inst);
  return inst;
}

ProblemInstance make_composite_quadratic(Index n, CompositeKind psi_kind, std::uint64_t seed,
                                         SetKind set_kind) {
  if (n < 1) throw InvalidInput("make_composite_quadratic: n must be >= 1");
  Rng rng(seed);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) g.col(j) = random_normal(n, rng);
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix u = qr.householderQ();
  const Vector eig = random_uniform(n, 0.1, 1.0, rng);
  const Matrix q = u * eig.asDiagonal() * u.transpose();
  const Vector c = 2.0 * random_normal(n, rng);

  CompositeTerm psi;
  switch (psi_kind) {
    case CompositeKind::zero:
      psi = CompositeTerm::zero(n);
      break;
    case CompositeKind::l1:
      psi = CompositeTerm::l1(n, 0.5);
      break;
    case CompositeKind::indicator:
      switch (set_kind) {
        case SetKind::box:
          psi = CompositeTerm::indicator(SimpleSet::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)));
          break;
        case SetKind::ball:
          psi = CompositeTerm::indicator(SimpleSet::ball(Vector::Zero(n), 1.0));
          break;
        case SetKind::simplex:
          psi = CompositeTerm::indicator(SimpleSet::simplex(n));
          break;
        case SetKind::whole_space:
          psi = CompositeTerm::zero(n);
          break;
      }
      break;
  }
  ProblemInstance inst = make_quadratic(q, c, std::move(psi));
  inst.name = "composite_quadratic_" + std::to_string(n) + "_" + inst.psi.describe();
  Vector start = random_normal(n, rng);
  inst.x0 = inst.psi.kind() == CompositeKind::indicator ? sample_point(inst.psi.domain(), rng, start) : start;
  set_radii(inst);
  inst.validate();
  return inst;
}

ProblemInstance make_curved_game(const Matrix& a, double kappa) {
  if (!(kappa > 0.0)) throw InvalidInput("make_curved_game: kappa must be positive");
  ProblemInstance game = make_bilinear_game(a);
  const Index dim = game.dim();
  const AffineMap* map = game.op->affine();
  auto op = std::make_shared<CurvedAffineOperator>(map->a, map->b, *game.x_star, kappa);
  // Coordinates live in [0, 1], so |z - z*| <= 1 and ||DV|| <= ||C|| + 2 kappa.
  op->constants().derivative_bound[1] = spectral_norm(map->a) + 2.0 * kappa;
  // (s|s| - t|t|)(s - t) >= |s - t|^3 / 2 and ||d||_3^3 >= ||d||_2^3 / sqrt(dim).
  op->constants().uniform_monotone[3] = kappa / (2.0 * std::sqrt(static_cast<double>(dim)));
  game.op = op;
  game.name = "curved_game_" + std::to_string(a.rows()) + "x" + std::to_string(a.cols());
  game.game_matrix.reset();
  game.validate();
  return game;
}

ProblemInstance make_random_curved_game(Index m, Index n, double kappa, std::uint64_t seed) {
  Rng rng(seed);
  return make_curved_game(random_uniform_matrix(m, n, -1.0, 1.0, rng), kappa);
}

ProblemInstance make_rotation_ball(double radius, double omega) {
  if (!(radius > 0.0) || !(omega >= 0.0)) throw InvalidInput("make_rotation_ball: invalid radius/omega");
  Matrix c(2, 2);
  c << 0.0, omega, -omega, 0.0;
  ProblemInstance inst;
  inst.name = "rotation_ball";
  inst.problem_class = ProblemClass::variational_inequality;
  inst.op = std::make_shared<AffineOperator>(c, Vector::Zero(2));
  inst.psi = CompositeTerm::indicator(SimpleSet::ball(Vector::Zero(2), radius));
  inst.metric = Metric::identity(2);
  inst.x0 = Vector::Zero(2);
  inst.x0(0) = 0.5 * radius;
  inst.x_star = Vector::Zero(2);
  set_radii(inst);
  inst.validate();
  return inst;
}

// ---- descriptors ---------------------------------------------------------------

std::vector<ZooEntry> list_problems() {
  return {
      {"matching_pennies", "", "2x2 matching-pennies game on Delta_2 x Delta_2"},
      {"bilinear_game", "m, n, seed", "random m x n matrix game, entries U[-1,1]"},
      {"curved_game", "m, n, kappa, seed", "random game plus kappa (z-z*)|z-z*| (M_2 = 2 kappa)"},
      {"chained_cubic", "n", "f = |x1|^3 + sum |x_{i+1} - 2 x_i|^3, x0 = ones"},
      {"strongly_monotone_affine", "n, mu, L, seed, domain", "(S + mu I)(x - x*), skew S"},
      {"composite_quadratic", "n, psi, seed", "0.5<Qx,x> - <c,x> + psi, psi in zero|box|ball|simplex|l1"},
      {"rotation_ball", "radius, omega", "planar rotation field on a ball (x* = 0)"},
  };
}

namespace {

class ParamReader {
 public:
  ParamReader(const InstanceDescriptor& d, std::set<std::string> allowed) : d_(d), allowed_(std::move(allowed)) {
    for (const auto& [key, value] : d_.params)
      if (!allowed_.count(key)) throw InvalidInput("instance." + key + ": unknown parameter for '" + d_.name + "'");
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = d_.params.find(key);
    return it == d_.params.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) const {
    const auto it = d_.params.find(key);
    if (it == d_.params.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw InvalidInput("instance." + key + ": expected a number, got '" + it->second + "'");
    }
  }

  long long integer(const std::string& key, long long fallback) const {
    const double v = real(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw InvalidInput("instance." + key + ": expected an integer");
    return static_cast<long long>(v);
  }

 private:
  const InstanceDescriptor& d_;
  std::set<std::string> allowed_;
};

SetKind parse_set_kind(const std::string& s, const std::string& field) {
  if (s == "whole" || s == "whole_space" || s == "zero") return SetKind::whole_space;
  if (s == "box") return SetKind::box;
  if (s == "ball") return SetKind::ball;
  if (s == "simplex") return SetKind::simplex;
  throw InvalidInput(field + ": unknown set kind '" + s + "'");
}

}  // namespace

ProblemInstance make_instance(const InstanceDescriptor& d) {
  if (d.name == "matching_pennies") {
    ParamReader r(d, {});
    return make_matching_pennies();
  }
  if (d.name == "bilinear_game") {
    ParamReader r(d, {"m", "n", "seed"});
    return make_random_bilinear_game(r.integer("m", 10), r.integer("n", 10), r.integer("seed", 1));
  }
  if (d.name == "curved_game") {
    ParamReader r(d, {"m", "n", "kappa", "seed"});
    return make_random_curved_game(r.integer("m", 10), r.integer("n", 10), r.real("kappa", 0.5),
                                   r.integer("seed", 1));
  }
  if (d.name == "chained_cubic") {
    ParamReader r(d, {"n"});
    return make_chained_cubic(r.integer("n", 5));
  }
  if (d.name == "strongly_monotone_affine") {
    ParamReader r(d, {"n", "mu", "L", "seed", "domain"});
    return make_strongly_monotone_affine(r.integer("n", 20), r.real("mu", 0.1), r.real("L", 1.0),
                                         r.integer("seed", 1),
                                         parse_set_kind(r.str("domain", "whole"), "instance.domain"));
  }
  if (d.name == "composite_quadratic") {
    ParamReader r(d, {"n", "psi", "seed"});
    const std::string psi = r.str("psi", "box");
    const Index n = r.integer("n", 10);
    const auto seed = r.integer("seed", 1);
    if (psi == "zero") return make_composite_quadratic(n, CompositeKind::zero, seed);
    if (psi == "l1") return make_composite_quadratic(n, CompositeKind::l1, seed);
    return make_composite_quadratic(n, CompositeKind::indicator, seed, parse_set_kind(psi, "instance.psi"));
  }
  if (d.name == "rotation_ball") {
    ParamReader r(d, {"radius", "omega"});
    return make_rotation_ball(r.real("radius", 1.0), r.real("omega", 1.0));
  }
  throw InvalidInput("instance.name: unknown zoo problem '" + d.name + "'");
}

}  // namespace rgvi
