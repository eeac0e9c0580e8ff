#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rgvi/errors.hpp"
#include "rgvi/metric.hpp"
#include "support/gen.hpp"

using namespace rgvi;

namespace {

// Projection onto {x >= 0, sum x = total} by bisection on the threshold tau in
// x = max(y - tau, 0). Independent of the sort-based routine under test.
Vector simplex_oracle(const Vector& y, double total) {
  double lo = y.minCoeff() - total, hi = y.maxCoeff();
  for (int k = 0; k < 300; ++k) {
    const double mid = 0.5 * (lo + hi);
    if ((y.array() - mid).max(0.0).sum() > total) lo = mid;
    else hi = mid;
  }
  return (y.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

Vector sample_in(const SimpleSet& s, gen::Gen& g) { return s.project(g.normal(s.dim(), 2.0)); }

}  // namespace

TEST_CASE("simplex projection matches the threshold-bisection oracle") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    gen::Gen g(seed);
    const Index n = g.integer(1, 12);
    const double total = g.uniform(0.3, 3.0);
    const Vector y = g.normal(n, 3.0);
    CAPTURE(seed);
    CHECK((project_simplex(y, total) - simplex_oracle(y, total)).norm() <= 1e-10);
  }
}

TEST_CASE("box and ball projections against closed forms") {
  gen::Gen g(3);
  for (int k = 0; k < 100; ++k) {
    const Vector lo = g.uniform_vec(5, -1.0, 0.0), hi = lo + g.uniform_vec(5, 0.1, 2.0);
    const Vector y = g.normal(5, 2.0);
    CHECK((SimpleSet::box(lo, hi).project(y) - y.cwiseMax(lo).cwiseMin(hi)).norm() == 0.0);
    const Vector c = g.normal(5);
    const double r = g.uniform(0.1, 2.0);
    const Vector expect = (y - c).norm() <= r ? y : Vector(c + r * (y - c) / (y - c).norm());
    CHECK((SimpleSet::ball(c, r).project(y) - expect).norm() <= 1e-14);
  }
}

TEST_CASE("property: projections are idempotent, nonexpansive and obtuse-angled") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    gen::Gen g(seed);
    const Index n = g.integer(1, 8);
    const SimpleSet s = g.set(n);
    const Vector y1 = g.normal(n, 3.0), y2 = g.normal(n, 3.0);
    const Vector p1 = s.project(y1), p2 = s.project(y2);
    CAPTURE(seed);
    CAPTURE(s.describe());
    CHECK(s.contains(p1, 1e-9));
    CHECK((s.project(p1) - p1).norm() <= 1e-12 * (1.0 + p1.norm()));
    CHECK((p1 - p2).norm() <= (y1 - y2).norm() + 1e-12);
    for (int k = 0; k < 10; ++k) {
      const Vector x = sample_in(s, g);
      CHECK((y1 - p1).dot(x - p1) <= 1e-9 * (1.0 + y1.norm() * x.norm()));
    }
  }
}

TEST_CASE("support function against per-block closed forms and sampled points") {
  gen::Gen g(11);
  const Vector lo = g.uniform_vec(4, -2.0, 0.0), hi = lo + g.uniform_vec(4, 0.5, 1.0);
  const Vector c = g.normal(3);
  const SimpleSet prod = SimpleSet::product(
      {SimpleSet::box(lo, hi), SimpleSet::ball(c, 0.7), SimpleSet::simplex(5, 2.0)});
  for (int k = 0; k < 50; ++k) {
    const Vector s = g.normal(12);
    double expect = 0.0;
    for (int i = 0; i < 4; ++i) expect += std::max(s[i] * lo[i], s[i] * hi[i]);
    expect += s.segment(4, 3).dot(c) + 0.7 * s.segment(4, 3).norm();
    expect += 2.0 * s.tail(5).maxCoeff();
    const SupportResult r = prod.support(s);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-13));
    CHECK(prod.contains(r.argmax, 1e-10));
    CHECK(s.dot(r.argmax) == doctest::Approx(r.value).epsilon(1e-12));
    for (int j = 0; j < 20; ++j) CHECK(s.dot(sample_in(prod, g)) <= r.value + 1e-12);
  }
  CHECK_THROWS_AS(SimpleSet::whole_space(3).support(Vector::Ones(3)), Unsupported);
  CHECK(SimpleSet::whole_space(3).support(Vector::Zero(3)).value == 0.0);
}

TEST_CASE("diameter and max_distance dominate sampled distances") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    gen::Gen g(seed);
    const SimpleSet s = g.set(g.integer(2, 6));
    if (!s.bounded()) {
      CHECK(std::isinf(s.diameter()));
      continue;
    }
    const Vector x = g.normal(s.dim());
    for (int k = 0; k < 30; ++k) {
      const Vector a = sample_in(s, g), b = sample_in(s, g);
      CHECK((a - b).norm() <= s.diameter() + 1e-12);
      CHECK((a - x).norm() <= s.max_distance(x) + 1e-12);
    }
  }
  CHECK(SimpleSet::simplex(4, 2.0).diameter() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(SimpleSet::ball(Vector::Zero(3), 1.5).diameter() == doctest::Approx(3.0));
}

TEST_CASE("projection Jacobian agrees with central differences at generic points") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    gen::Gen g(seed);
    const Index n = g.integer(2, 6);
    const SimpleSet s = g.set(n);
    const Vector u = g.normal(n, 2.0);
    const Matrix j = s.projection_jacobian(u);
    Matrix fd(n, n);
    const double h = 1e-7;
    for (Index i = 0; i < n; ++i) {
      Vector e = Vector::Zero(n);
      e[i] = h;
      fd.col(i) = (s.project(u + e) - s.project(u - e)) / (2.0 * h);
    }
    CAPTURE(seed);
    CHECK((j - fd).norm() <= 1e-5 * (1.0 + j.norm()));
  }
}

TEST_CASE("l1 prox is soft thresholding") {
  gen::Gen g(5);
  const CompositeTerm psi = CompositeTerm::l1(6, 0.4);
  for (int k = 0; k < 50; ++k) {
    const Vector u = g.normal(6);
    const double w = g.uniform(0.1, 2.0);
    const double tau = 0.4 * w;
    const Vector expect = u.array().sign() * (u.array().abs() - tau).max(0.0);
    CHECK((psi.euclidean_prox(u, w) - expect).norm() <= 1e-15);
  }
  CHECK(psi.value(Vector::Constant(6, -1.0)) == doctest::Approx(2.4));
}

TEST_CASE("property: metric prox minimizes its objective against sampled competitors") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    gen::Gen g(seed);
    const Index n = g.integer(1, 6);
    const CompositeTerm psi = g.composite(n);
    const Metric metric = g.metric(n);
    const double w = g.uniform(0.1, 2.0);
    const Vector t = g.normal(n, 2.0);
    auto obj = [&](const Vector& x) { return 0.5 * std::pow(metric.norm(x - t), 2) + w * psi.value(x); };
    const Vector p = metric_prox(t, psi, metric, w);
    CAPTURE(seed);
    CAPTURE(psi.describe());
    REQUIRE(psi.in_domain(p, 1e-8));
    const double best = obj(p);
    for (int k = 0; k < 40; ++k) {
      Vector x = p + g.normal(n, g.log_uniform(1e-4, 1.0));
      if (psi.kind() == CompositeKind::indicator) x = psi.domain().project(x);
      CHECK(best <= obj(x) + 1e-8 * (1.0 + std::abs(best)));
    }
  }
}

TEST_CASE("dual norm, Bregman distance and power prox derivatives") {
  gen::Gen g(9);
  const Matrix b = g.spd(5, 0.5, 2.0);
  const Metric m = Metric::dense(b);
  const Vector x = g.normal(5), y = g.normal(5), s = g.normal(5);
  CHECK(m.dual_norm(s) == doctest::Approx(std::sqrt(s.dot(b.inverse() * s))).epsilon(1e-12));
  CHECK(bregman(x, y, m) == doctest::Approx(0.5 * (x - y).dot(b * (x - y))).epsilon(1e-12));
  for (int degree : {2, 3, 4}) {
    const PowerProx d(degree, m);
    Vector fd(5);
    for (int i = 0; i < 5; ++i) {
      Vector e = Vector::Zero(5);
      e[i] = 1e-6;
      fd[i] = (d.value(x + e) - d.value(x - e)) / 2e-6;
    }
    CHECK((d.gradient(x) - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
    Matrix hfd(5, 5);
    for (int i = 0; i < 5; ++i) {
      Vector e = Vector::Zero(5);
      e[i] = 1e-6;
      hfd.col(i) = (d.gradient(x + e) - d.gradient(x - e)) / 2e-6;
    }
    CHECK((d.hessian(x) - hfd).norm() <= 1e-5 * (1.0 + hfd.norm()));
    CHECK(bregman_distance(d, x, y) >= -1e-12);
  }
  CHECK(bregman_distance(PowerProx(2, m), x, y) == doctest::Approx(bregman(x, y, m)).epsilon(1e-10));
  CHECK_THROWS_AS(Metric::dense(-b), InvalidInput);
}
