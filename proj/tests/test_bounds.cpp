#include <doctest.h>

#include <cmath>

#include "rgvi/bounds.hpp"
#include "rgvi/steps.hpp"
#include "support/gen.hpp"

using namespace rgvi;

namespace {

double factorial(int p) {
  double f = 1.0;
  for (int i = 2; i <= p; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("bound formulas against direct expressions") {
  gen::Gen g(1);
  for (int k = 0; k < 200; ++k) {
    const int p = g.integer(1, 3);
    const double gamma = g.log_uniform(1e-2, 10.0), R = g.log_uniform(0.1, 10.0), t = g.integer(1, 5000);
    const double L = g.log_uniform(0.1, 10.0);
    CAPTURE(p);
    CHECK(bound_grad_min(p, gamma, R, t) == doctest::Approx(std::pow(R / gamma, p) * std::pow(t, -0.5 * p)));
    CHECK(bound_grad_min_star(p, L, R, t) ==
          doctest::Approx((p + 1) * L / factorial(p) * std::pow(R, p) * std::pow(t, -0.5 * p)));
    const double shape = std::pow((p - 1.0) / (p + 1.0), 0.5 * (p - 1));
    CHECK(bound_value_min(p, gamma, R, t) ==
          doctest::Approx(std::pow(R, p + 1) / (p + 1) * std::pow(gamma, -p) * shape * std::pow(t, -0.5 * (p + 1))));
    CHECK(bound_value_min_star(p, L, R, t) ==
          doctest::Approx(L * std::pow(R, p + 1) / factorial(p) * shape * std::pow(t, -0.5 * (p + 1))));
    const int q = p - 1;
    CHECK(bound_grad_vi(q, gamma, R, t) == doctest::Approx(std::pow(t, -0.5 * (q + 1)) * std::pow(R / gamma, q + 1)));
    CHECK(bound_certificate_vi(q, gamma, R, t) ==
          doctest::Approx(std::pow(t, -0.5 * (q + 2)) * std::pow(gamma, -(q + 1)) * std::pow(R, q + 2) / (q + 2)));
  }
}

TEST_CASE("bounds at the optimal M agree with the gamma versions") {
  for (int p = 1; p <= 3; ++p) {
    const double L = 1.7, R = 2.3, t = 37.0;
    const double gamma = gamma_min_optimal(p, L);
    CAPTURE(p);
    // The star forms are simplified upper bounds; p = 1 is exact.
    CHECK(bound_grad_min_star(p, L, R, t) >= bound_grad_min(p, gamma, R, t) * (1.0 - 1e-12));
    CHECK(bound_value_min_star(p, L, R, t) >= bound_value_min(p, gamma, R, t) * (1.0 - 1e-12));
    if (p == 1) {
      CHECK(bound_grad_min_star(p, L, R, t) == doctest::Approx(bound_grad_min(p, gamma, R, t)));
      CHECK(bound_value_min_star(p, L, R, t) == doctest::Approx(bound_value_min(p, gamma, R, t)));
    }
  }
  for (int p = 0; p <= 1; ++p) {
    const double mhat = 1.3, R = 0.9, t = 50.0;
    const double gamma = gamma_vi(p, default_vi_M(p, mhat), mhat);
    CAPTURE(p);
    CHECK(bound_certificate_vi_star(p, mhat, R, t) >= bound_certificate_vi(p, gamma, R, t) * (1.0 - 1e-12));
    CHECK(bound_grad_vi_star(p, mhat, R, t) >= bound_grad_vi(p, gamma, R, t) * (1.0 - 1e-12));
    // Prefactors 2e/(p+1)! and 2e(p+2)/(p+1)!.
    CHECK(bound_certificate_vi_star(p, mhat, R, t) ==
          doctest::Approx(2.0 * M_E / factorial(p + 1) * mhat * std::pow(R, p + 2) * std::pow(t, -0.5 * (p + 2))));
  }
}

TEST_CASE("uniform-monotone rate and switching bound") {
  CHECK(alpha_uniform(0, 0.125, 0.5) == doctest::Approx(0.125));
  for (int p = 0; p <= 1; ++p) CHECK(alpha_uniform(p, 0.2, 0.3) > 0.0);
  for (int p = 1; p <= 2; ++p) {
    double prev = kInfinity;
    for (double n : {10.0, 20.0, 40.0, 80.0}) {
      const double b = bound_switching(p, 0.3, 1.0, n);
      CHECK(b > 0.0);
      CHECK(b < prev);
      prev = b;
    }
  }
}

// The lemma bound with L^2 S2 <= ln 2 and S1 >= 2 sqrt(m-1) / ((1 + sqrt 2) L) gives
// (1 + sqrt 2)(1 + ln 2) / (4 sqrt(m-1)) L D^2. The closed-form rate keeps only the
// ln 2 of the numerator and a 2 in the denominator, so it is smaller by
// (1 + ln 2) / (2 ln 2) and is not implied by the lemma.
TEST_CASE("property: window bound for h_k = 1/(L sqrt(k+1)) against the rate bounds") {
  gen::Gen g(4);
  for (int k = 0; k < 100; ++k) {
    const double L = g.log_uniform(0.1, 10.0), D = g.log_uniform(0.1, 10.0);
    const int m = g.integer(2, 2000);
    double s1 = 0.0, s2 = 0.0;
    for (int i = m; i <= 2 * m - 1; ++i) {
      const double h = 1.0 / (L * std::sqrt(i + 1.0));
      s1 += h;
      s2 += h * h;
    }
    const double direct = (1.0 + L * L * s2) / (2.0 * s1) * D * D;
    CAPTURE(m);
    CHECK(bound_window(L, s1, s2, D) == doctest::Approx(direct));
    const double implied = (1.0 + std::sqrt(2.0)) * (1.0 + std::log(2.0)) / (4.0 * std::sqrt(m - 1.0)) * L * D * D;
    CHECK(direct <= implied * (1.0 + 1e-12));
    CHECK(implied / bound_window_rate(L, D, m) == doctest::Approx((1.0 + std::log(2.0)) / (2.0 * std::log(2.0))));
    CHECK(bound_window_rate(L, D, m) ==
          doctest::Approx((1.0 + std::sqrt(2.0)) * std::log(2.0) / (2.0 * std::sqrt(m - 1.0)) * L * D * D));
  }
}
