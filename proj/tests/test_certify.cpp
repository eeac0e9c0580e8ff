#include <doctest.h>

#include <cmath>

#include "rgvi/certify.hpp"
#include "rgvi/errors.hpp"
#include "rgvi/game_lp.hpp"
#include "rgvi/sampling.hpp"
#include "support/gen.hpp"

using namespace rgvi;

namespace {

// sup over the box of <V(x), xbar - x> for affine V by projected gradient ascent
// from many starts. The objective is concave, so every start should agree.
double brute_merit_affine(const Vector& xbar, const ProblemInstance& inst) {
  const AffineMap& map = *inst.op->affine();
  auto phi = [&](const Vector& x) { return (map.a * x + map.b).dot(xbar - x); };
  const Matrix s = map.a + map.a.transpose();
  const double h = 1.0 / spectral_norm(s);
  Rng rng(99);
  double best = -kInfinity;
  for (int start = 0; start < 10; ++start) {
    Vector x = sample_point(inst.psi.domain(), rng, inst.x0);
    for (int it = 0; it < 20000; ++it) {
      const Vector grad = map.a.transpose() * (xbar - x) - (map.a * x + map.b);
      x = inst.psi.domain().project(x + h * grad);
    }
    best = std::max(best, phi(x));
  }
  return best;
}

}  // namespace

TEST_CASE("closed-form merit on games equals the duality gap") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index m = 3 + seed % 4, n = 2 + seed % 5;
    const ProblemInstance inst = make_random_bilinear_game(m, n, seed);
    const Matrix& a = *inst.game_matrix;
    Rng rng(seed);
    for (int k = 0; k < 10; ++k) {
      const Vector z = sample_point(inst.psi.domain(), rng, inst.x0);
      const Vector x = z.head(n), y = z.tail(m);
      const double gap = (a * x).maxCoeff() - (a.transpose() * y).minCoeff();
      const MeritValue mv = merit(z, inst);
      CHECK(mv.mode == MeritMode::closed_form);
      CHECK(mv.exact);
      CHECK(mv.value == doctest::Approx(gap).epsilon(1e-12).scale(1.0));
      CHECK(game_gap(a, x, y) == doctest::Approx(gap).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("inner-solve merit matches projected-ascent brute force") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const ProblemInstance inst = make_strongly_monotone_affine(5, 0.2, 1.0, seed, SetKind::box);
    Rng rng(seed + 10);
    for (int k = 0; k < 4; ++k) {
      const Vector xbar = sample_point(inst.psi.domain(), rng, inst.x0);
      const MeritValue mv = merit(xbar, inst);
      CAPTURE(seed);
      CHECK(mv.mode == MeritMode::inner_solve);
      CHECK(mv.exact);
      CHECK(mv.value == doctest::Approx(brute_merit_affine(xbar, inst)).epsilon(1e-8).scale(1.0));
      CHECK(mv.value >= 0.0);
    }
    CHECK(merit(*inst.x_star, inst).value <= 1e-9);
  }
}

TEST_CASE("property: sampled merit is a lower bound on the exact merit") {
  std::vector<ProblemInstance> insts;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    insts.push_back(make_random_bilinear_game(4, 5, seed));
    insts.push_back(make_strongly_monotone_affine(5, 0.1, 1.0, seed, SetKind::box));
    insts.push_back(make_strongly_monotone_affine(5, 0.1, 1.0, seed, SetKind::ball));
  }
  for (const auto& inst : insts) {
    Rng rng(3);
    for (int k = 0; k < 5; ++k) {
      const Vector xbar = sample_point(inst.psi.domain(), rng, inst.x0);
      const MeritValue exact = merit(xbar, inst);
      const MeritValue lower = merit(xbar, inst, MeritMode::sample_lower_bound, 17 + k);
      CAPTURE(inst.name);
      CHECK_FALSE(lower.exact);
      CHECK(lower.value >= 0.0);
      CHECK(lower.value <= exact.value + 1e-9 * (1.0 + exact.value));
    }
  }
  const ProblemInstance game = make_matching_pennies();
  const Vector z(Vector::LinSpaced(4, 0.2, 0.8));
  const Vector zz = game.psi.domain().project(z);
  CHECK(merit(zz, game, MeritMode::inner_solve).value ==
        doctest::Approx(merit(zz, game, MeritMode::closed_form).value).epsilon(1e-12));
  const ProblemInstance sm = make_strongly_monotone_affine(3, 0.1, 1.0, 1);
  CHECK_THROWS_AS(merit(sm.x0, sm, MeritMode::closed_form), Unsupported);
  CHECK_THROWS_AS(merit(Vector::Constant(4, 3.0), game), InvalidInput);
}

TEST_CASE("composite support on a whole-space ball is <w, c> + R ||w||_*") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    gen::Gen g(seed);
    const Index n = g.integer(1, 6);
    const Metric metric = g.metric(n);
    const Vector w = g.normal(n), c = g.normal(n);
    const double r = g.uniform(0.1, 3.0);
    const SupportQuery q = composite_support(w, CompositeTerm::zero(n), metric, 0.0, c, r);
    const double exact = w.dot(c) + r * metric.dual_norm(w);
    CAPTURE(seed);
    CHECK(q.value >= exact - 1e-9 * (1.0 + std::abs(exact)));
    CHECK(q.value - q.gap <= exact + 1e-9 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("property: composite support dominates feasible samples") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    gen::Gen g(seed);
    const Index n = g.integer(1, 6);
    const CompositeTerm psi = g.composite(n);
    const Metric metric = Metric::identity(n);
    const Vector w = g.normal(n);
    const double weight = g.coin() ? 0.0 : g.uniform(0.1, 2.0);
    const Vector c = psi.domain().project(g.normal(n));
    const double r = g.uniform(0.1, 3.0);
    const SupportQuery q = composite_support(w, psi, metric, weight, c, r);
    CAPTURE(seed);
    CAPTURE(psi.describe());
    CHECK(q.gap >= 0.0);
    for (int k = 0; k < 200; ++k) {
      Vector x = c + g.normal(n, r);
      x = psi.domain().project(x);
      if ((x - c).norm() > r) continue;
      CHECK(w.dot(x) - weight * psi.value(x) <= q.value + 1e-10 * (1.0 + std::abs(q.value)));
    }
  }
}

TEST_CASE("certificate accumulator reproduces a hand-computed sum") {
  // psi = 0 on R^2, identity metric, x0 = 0 for the sum below.
  ProblemInstance inst = make_composite_quadratic(2, CompositeKind::zero, 1);
  inst.x0 = Vector::Zero(2);
  CertificateAccumulator acc(CertificateKind::functional, inst, 2.0);
  CHECK(std::isinf(acc.value().value));
  acc.add(1.0, Vector::Unit(2, 0), Vector::Unit(2, 0));        // <g, x> = 1
  acc.add(3.0, Vector::Unit(2, 1), Vector(Vector::Ones(2)));  // <g, x> = 1
  // L = (4, 3), ||L|| = 5: Delta = (1 + 3 + 2 * 5) / 4.
  CHECK(acc.A() == 4.0);
  CHECK(acc.value().value == doctest::Approx(3.5).epsilon(1e-12));
  CHECK_THROWS_AS(acc.add(-1.0, Vector::Zero(2), Vector::Zero(2)), InvalidInput);
  CHECK_THROWS_AS(CertificateAccumulator(CertificateKind::functional, inst, 0.0), InvalidInput);
}

TEST_CASE("property: the variational certificate dominates the merit of the average") {
  // Monotonicity and convexity of psi give Delta^V_t >= mu_psi(xbar) on bounded domains.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ProblemInstance inst = make_random_bilinear_game(4, 3, seed);
    CertificateAccumulator acc(CertificateKind::variational, inst, default_certificate_radius(inst));
    gen::Gen g(seed);
    Rng rng(seed);
    Vector xbar = Vector::Zero(inst.dim());
    for (int k = 0; k < 8; ++k) {
      const Vector x = sample_point(inst.psi.domain(), rng, inst.x0);
      const double a = g.uniform(0.1, 2.0);
      acc.add(a, x, inst.op->value(x));
      xbar += a * x;
    }
    xbar /= acc.A();
    CAPTURE(seed);
    CHECK(acc.value().value >= merit(xbar, inst).value - 1e-10);
  }
}

TEST_CASE("default certificate radius") {
  const ProblemInstance game = make_matching_pennies();
  CHECK(default_certificate_radius(game) == *game.R0);
  const ProblemInstance sm = make_strongly_monotone_affine(6, 0.1, 1.0, 2);
  CHECK_FALSE(sm.R0.has_value());
  CHECK(default_certificate_radius(sm) == doctest::Approx(1.0).epsilon(1e-10));
  ProblemInstance bare = make_chained_cubic(3);
  bare.x_star.reset();
  bare.R0.reset();
  CHECK_THROWS_AS(default_certificate_radius(bare), ConfigurationError);
}
