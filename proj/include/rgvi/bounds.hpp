#pragma once

// Closed-form convergence bounds evaluated with actual constants.

namespace rgvi {

// Gradient-norm bound for minimization: g*_t <= (R / gamma)^p t^{-p/2}.
double bound_grad_min(int p, double gamma, double R, double t);
// Same at M = p L_p: (p+1) L_p / p! R^p t^{-p/2}.
double bound_grad_min_star(int p, double lipschitz, double R, double t);
// F~_t - F* <= R^{p+1}/(p+1) gamma^{-p} ((p-1)/(p+1))^{(p-1)/2} t^{-(p+1)/2}.
double bound_value_min(int p, double gamma, double R, double t);
// Same at M = p L_p: L_p R^{p+1} / p! ((p-1)/(p+1))^{(p-1)/2} t^{-(p+1)/2}.
double bound_value_min_star(int p, double lipschitz, double R, double t);
// Switching scheme, N = 2t total steps.
double bound_switching(int p, double gamma, double R, double N);
double bound_switching_simple(int p, double lipschitz, double R, double N);

// VI: g*_t <= t^{-(p+1)/2} (R / gamma-hat)^{p+1}.
double bound_grad_vi(int p, double gamma_hat, double R, double t);
// VI: Delta_t <= t^{-(p+2)/2} gamma-hat^{-(p+1)} R0^{p+2} / (p+2).
double bound_certificate_vi(int p, double gamma_hat, double R0, double t);
// Versions at the optimal M: 2e/(p+1)! and 2e(p+2)/(p+1)! prefactors.
double bound_certificate_vi_star(int p, double mhat, double R0, double t);
double bound_grad_vi_star(int p, double mhat, double R, double t);

// Linear-rate parameter of the uniformly monotone method; p = 0 uses the
// limit 2 gamma-hat sigma_2.
double alpha_uniform(int p, double gamma_hat, double sigma);

// Gradient method on a window of iterations: (1 + L^2 S2) / (2 S1) D^2.
double bound_window(double lipschitz, double s1, double s2, double D);
// Window [m, 2m-1] with h_k = 1/(L sqrt(k+1)): (1 + sqrt 2) ln 2 / (2 sqrt(m-1)) L D^2.
double bound_window_rate(double lipschitz, double D, int m);

}  // namespace rgvi
