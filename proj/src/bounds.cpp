#include "rgvi/bounds.hpp"

#include <cmath>

#include "rgvi/errors.hpp"

namespace rgvi {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// ((p-1)/(p+1))^e with 0^0 = 1.
double ratio_power(int p, double e) {
  if (e == 0.0) return 1.0;
  return std::pow((p - 1.0) / (p + 1.0), e);
}

void check(bool ok, const char* who) {
  if (!ok) throw InvalidInput(std::string(who) + ": invalid arguments");
}

}  // namespace

double bound_grad_min(int p, double gamma, double R, double t) {
  check(p >= 1 && gamma > 0.0 && R >= 0.0 && t > 0.0, "bound_grad_min");
  return std::pow(R / gamma, p) * std::pow(t, -0.5 * p);
}

double bound_grad_min_star(int p, double lipschitz, double R, double t) {
  check(p >= 1 && lipschitz >= 0.0 && R >= 0.0 && t > 0.0, "bound_grad_min_star");
  return (p + 1.0) * lipschitz / factorial(p) * std::pow(R, p) * std::pow(t, -0.5 * p);
}

double bound_value_min(int p, double gamma, double R, double t) {
  check(p >= 1 && gamma > 0.0 && R >= 0.0 && t > 0.0, "bound_value_min");
  return std::pow(R, p + 1) / (p + 1.0) * std::pow(gamma, -p) * ratio_power(p, 0.5 * (p - 1)) *
         std::pow(t, -0.5 * (p + 1));
}

double bound_value_min_star(int p, double lipschitz, double R, double t) {
  check(p >= 1 && lipschitz >= 0.0 && R >= 0.0 && t > 0.0, "bound_value_min_star");
  return lipschitz * std::pow(R, p + 1) / factorial(p) * ratio_power(p, 0.5 * (p - 1)) *
         std::pow(t, -0.5 * (p + 1));
}

double bound_switching(int p, double gamma, double R, double N) {
  check(p >= 1 && gamma > 0.0 && R >= 0.0 && N > 0.0, "bound_switching");
  const double q = p + 1.0;
  return std::pow(R / gamma, p) * std::pow(1.0 / q, p / q) * ratio_power(p, p * (p - 1.0) / (2.0 * q)) *
         std::pow(2.0 / N, p * (p + 3.0) / (2.0 * q));
}

double bound_switching_simple(int p, double lipschitz, double R, double N) {
  check(p >= 1 && lipschitz >= 0.0 && R >= 0.0 && N > 0.0, "bound_switching_simple");
  return 2.0 * lipschitz * std::pow(R, p) / factorial(p) * std::pow(2.0 / N, p * (p + 3.0) / (2.0 * (p + 1.0)));
}

double bound_grad_vi(int p, double gamma_hat, double R, double t) {
  check(p >= 0 && gamma_hat > 0.0 && R >= 0.0 && t > 0.0, "bound_grad_vi");
  return std::pow(t, -0.5 * (p + 1)) * std::pow(R / gamma_hat, p + 1);
}

double bound_certificate_vi(int p, double gamma_hat, double R0, double t) {
  check(p >= 0 && gamma_hat > 0.0 && R0 >= 0.0 && t > 0.0, "bound_certificate_vi");
  return std::pow(t, -0.5 * (p + 2)) * std::pow(gamma_hat, -(p + 1.0)) * std::pow(R0, p + 2) / (p + 2.0);
}

double bound_certificate_vi_star(int p, double mhat, double R0, double t) {
  check(p >= 0 && mhat >= 0.0 && R0 >= 0.0 && t > 0.0, "bound_certificate_vi_star");
  return 2.0 * std::exp(1.0) / factorial(p + 1) * std::pow(t, -0.5 * (p + 2)) * mhat * std::pow(R0, p + 2);
}

double bound_grad_vi_star(int p, double mhat, double R, double t) {
  check(p >= 0 && mhat >= 0.0 && R >= 0.0 && t > 0.0, "bound_grad_vi_star");
  return 2.0 * std::exp(1.0) * (p + 2.0) / factorial(p + 1) * std::pow(t, -0.5 * (p + 1)) * mhat *
         std::pow(R, p + 1);
}

double alpha_uniform(int p, double gamma_hat, double sigma) {
  check(p >= 0 && gamma_hat >= 0.0 && sigma >= 0.0, "alpha_uniform");
  if (p == 0) return 2.0 * gamma_hat * sigma;
  const double q = p + 2.0;
  return q * gamma_hat * std::pow(gamma_hat / p, p / q) * std::pow(sigma, 2.0 / q);
}

double bound_window(double lipschitz, double s1, double s2, double D) {
  check(lipschitz >= 0.0 && s1 > 0.0 && s2 >= 0.0 && D >= 0.0, "bound_window");
  return (1.0 + lipschitz * lipschitz * s2) / (2.0 * s1) * D * D;
}

double bound_window_rate(double lipschitz, double D, int m) {
  check(lipschitz >= 0.0 && D >= 0.0 && m >= 2, "bound_window_rate");
  return (1.0 + std::sqrt(2.0)) * std::log(2.0) / (2.0 * std::sqrt(m - 1.0)) * lipschitz * D * D;
}

}  // namespace rgvi
