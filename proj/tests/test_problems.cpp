#include <doctest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "rgvi/certify.hpp"
#include "rgvi/errors.hpp"
#include "rgvi/game_lp.hpp"
#include "rgvi/problems.hpp"
#include "support/gen.hpp"

using namespace rgvi;

namespace {

nlohmann::json load_games() {
  std::ifstream in(std::string(RGVI_TEST_DATA_DIR) + "/games.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in)["games"];
}

Matrix to_matrix(const nlohmann::json& rows) {
  Matrix a(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j].get<double>();
  return a;
}

Vector to_vector(const nlohmann::json& v) {
  Vector x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i].get<double>();
  return x;
}

double chained_f(const Vector& x) {
  double f = std::pow(std::abs(x[0]), 3);
  for (Index i = 0; i + 1 < x.size(); ++i) f += std::pow(std::abs(x[i + 1] - 2.0 * x[i]), 3);
  return f;
}

}  // namespace

TEST_CASE("chained cubic reproduces the level-set example values exactly") {
  for (int n = 2; n <= 10; ++n) {
    const ProblemInstance inst = make_chained_cubic(n);
    Vector xbar(n);
    for (int i = 0; i < n; ++i) xbar[i] = std::ldexp(1.0, i + 1) - 1.0;
    CHECK(inst.objective(Vector::Ones(n)) == n);
    CHECK(inst.objective(xbar) == n);
    CHECK(xbar.squaredNorm() == 8.0 * (std::ldexp(1.0, n) - 1.0) * (std::ldexp(1.0, n - 1) - 1.0) / 3.0 + n);
    CHECK(*inst.f_star == 0.0);
    CHECK(inst.x_star->norm() == 0.0);
  }
}

TEST_CASE("chained cubic derivatives against finite differences of f") {
  const ProblemInstance inst = make_chained_cubic(6);
  gen::Gen g(4);
  for (int k = 0; k < 20; ++k) {
    const Vector x = g.normal(6);
    CHECK(inst.objective(x) == doctest::Approx(chained_f(x)).epsilon(1e-14));
    Vector fd(6);
    Matrix jfd(6, 6);
    for (int i = 0; i < 6; ++i) {
      Vector e = Vector::Zero(6);
      e[i] = 1e-6;
      fd[i] = (chained_f(x + e) - chained_f(x - e)) / 2e-6;
      jfd.col(i) = (inst.op->value(x + e) - inst.op->value(x - e)) / 2e-6;
    }
    CHECK((inst.op->value(x) - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
    CHECK((inst.op->jacobian(x) - jfd).norm() <= 1e-5 * (1.0 + jfd.norm()));
    const Vector h1 = g.normal(6), h2 = g.normal(6);
    const Vector d2 = inst.op->second_derivative(x, h1, h2);
    const Vector d2fd = (inst.op->jacobian(x + 1e-6 * h2) - inst.op->jacobian(x - 1e-6 * h2)) * h1 / 2e-6;
    CHECK((d2 - d2fd).norm() <= 1e-5 * (1.0 + d2fd.norm()));
  }
}

TEST_CASE("chained cubic L2 dominates sampled Hessian variation") {
  const ProblemInstance inst = make_chained_cubic(5);
  const double l2 = *inst.constants().lipschitz[2];
  gen::Gen g(8);
  for (int k = 0; k < 200; ++k) {
    const Vector x = g.normal(5, 2.0), y = g.normal(5, 2.0);
    Eigen::JacobiSVD<Matrix> svd(inst.op->jacobian(x) - inst.op->jacobian(y));
    CHECK(svd.singularValues()(0) <= l2 * (x - y).norm() + 1e-12);
  }
}

TEST_CASE("game LP solver matches the scipy reference games") {
  const auto games = load_games();
  REQUIRE(games.size() >= 5);
  for (const auto& gm : games) {
    const Matrix a = to_matrix(gm["A"]);
    const GameSolution sol = solve_matrix_game(a);
    CAPTURE(a.rows());
    CHECK(sol.value == doctest::Approx(gm["value"].get<double>()).epsilon(1e-9));
    CHECK(game_gap(a, sol.x, sol.y) <= 1e-9);
    // The reference strategies are an equilibrium for our gap formula too.
    CHECK(game_gap(a, to_vector(gm["x"]), to_vector(gm["y"])) <= 1e-8);
    const ProblemInstance inst = make_bilinear_game(a);
    CHECK(merit(*inst.x_star, inst).value <= 1e-9);
  }
}

TEST_CASE("matching pennies equilibrium and operator") {
  const ProblemInstance inst = make_matching_pennies();
  CHECK((*inst.x_star - Vector::Constant(4, 0.5)).norm() <= 1e-12);
  CHECK(inst.op->value(*inst.x_star).norm() <= 1e-12);
  gen::Gen g(2);
  for (int k = 0; k < 20; ++k) {
    const Vector z = g.normal(4);
    CHECK(std::abs(inst.op->value(z).dot(z)) <= 1e-12 * (1.0 + z.squaredNorm()));
  }
}

TEST_CASE("strongly monotone affine instance has the requested constants") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ProblemInstance inst = make_strongly_monotone_affine(12, 0.1, 1.0, seed);
    const Matrix a = inst.op->affine()->a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(spectral_norm(a) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(inst.op->value(*inst.x_star).norm() <= 1e-12);
    CHECK(inst.metric.norm(inst.x0 - *inst.x_star) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const ProblemInstance boxed = make_strongly_monotone_affine(8, 0.2, 2.0, 3, SetKind::box);
  CHECK(boxed.psi.in_domain(*boxed.x_star));
  CHECK(boxed.R0.has_value());
  CHECK_THROWS_AS(make_strongly_monotone_affine(4, 2.0, 1.0, 1), InvalidInput);
}

TEST_CASE("curved game keeps the game equilibrium and its M-hat_2") {
  const ProblemInstance inst = make_random_curved_game(6, 5, 0.7, 2);
  const ProblemInstance base = make_random_bilinear_game(6, 5, 2);
  CHECK((*inst.x_star - *base.x_star).norm() <= 1e-12);
  CHECK(*inst.constants().derivative_bound[2] == doctest::Approx(1.4));
  gen::Gen g(6);
  for (int k = 0; k < 100; ++k) {
    const Vector x = g.normal(11), h = g.normal(11);
    const Vector d2 = inst.op->second_derivative(x, h, h);
    CHECK(d2.norm() <= 1.4 * h.squaredNorm() + 1e-12);
    const Vector y = g.normal(11);
    CHECK((inst.op->value(x) - inst.op->value(y)).dot(x - y) >= -1e-12);
  }
}

TEST_CASE("quadratic instances solve for x* and F*") {
  for (auto kind : {CompositeKind::zero, CompositeKind::l1}) {
    const ProblemInstance inst = make_composite_quadratic(8, kind, 4);
    const Vector xs = *inst.x_star;
    gen::Gen g(12);
    for (int k = 0; k < 100; ++k) {
      const Vector x = xs + g.normal(8, g.log_uniform(1e-4, 1.0));
      CHECK(inst.objective(x) >= *inst.f_star - 1e-12);
    }
  }
  const ProblemInstance simplex = make_composite_quadratic(6, CompositeKind::indicator, 2, SetKind::simplex);
  CHECK(simplex.psi.in_domain(*simplex.x_star, 1e-10));
}

TEST_CASE("instance descriptors: defaults build, errors name the field") {
  for (const auto& e : list_problems()) {
    CAPTURE(e.name);
    const ProblemInstance inst = make_instance({e.name, {}});
    CHECK(inst.dim() > 0);
    CHECK(inst.x_star.has_value());
  }
  auto message = [](const InstanceDescriptor& d) {
    try {
      make_instance(d);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message({"no_such_problem", {}}).rfind("instance.name", 0) == 0);
  CHECK(message({"bilinear_game", {{"colour", "3"}}}).rfind("instance.colour", 0) == 0);
  CHECK(message({"bilinear_game", {{"m", "ten"}}}).rfind("instance.m", 0) == 0);
  CHECK(message({"bilinear_game", {{"m", "2.5"}}}).rfind("instance.m", 0) == 0);
  const ProblemInstance g = make_instance({"bilinear_game", {{"m", "3"}, {"n", "4"}, {"seed", "9"}}});
  CHECK(g.dim() == 7);
}

TEST_CASE("validate rejects a non-monotone operator") {
  ProblemInstance inst = make_strongly_monotone_affine(4, 0.1, 1.0, 1);
  inst.op = std::make_shared<AffineOperator>(-Matrix::Identity(4, 4), Vector::Zero(4));
  CHECK_THROWS_AS(inst.validate(), InvalidInput);
}
