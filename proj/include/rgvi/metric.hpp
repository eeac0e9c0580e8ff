#pragma once

#include "rgvi/composite.hpp"
#include "rgvi/linalg.hpp"

namespace rgvi {

// Euclidean metric ||x||_B = <Bx, x>^{1/2} for a symmetric positive-definite B.
// Identity and diagonal B are stored compactly; dense B keeps its Cholesky factor.
class Metric {
 public:
  enum class Kind { identity, diagonal, dense };

  Metric() = default;

  static Metric identity(Index dim);
  static Metric diagonal(Vector weights);
  // Throws InvalidInput if B is not symmetric positive definite.
  static Metric dense(Matrix b);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }
  bool is_identity() const { return kind_ == Kind::identity; }
  bool is_diagonal() const { return kind_ != Kind::dense; }
  const Vector& diagonal_weights() const { return diag_; }

  Vector apply(const Vector& x) const;        // B x
  Vector apply_inverse(const Vector& g) const;  // B^{-1} g
  Matrix matrix() const;
  double max_eigenvalue() const;
  double min_eigenvalue() const;

  double norm(const Vector& x) const;
  double dual_norm(const Vector& g) const;
  double inner(const Vector& x, const Vector& y) const { return apply(x).dot(y); }

 private:
  Kind kind_ = Kind::identity;
  Index dim_ = 0;
  Vector diag_;
  Matrix dense_;
  Eigen::LLT<Matrix> llt_;
};

// <g, B^{-1} g>^{1/2}. Throws InvalidInput on non-finite components.
double dual_norm(const Vector& g, const Metric& metric);

// Power prox-function d_p(x) = ||x||_B^p / p, p >= 2.
class PowerProx {
 public:
  PowerProx(int degree, Metric metric);

  int degree() const { return degree_; }
  const Metric& metric() const { return metric_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;  // ||x||^{p-2} B x
  Matrix hessian(const Vector& x) const;   // ||x||^{p-2} [B + (p-2) B x x^T B / ||x||^2]

 private:
  int degree_;
  Metric metric_;
};

// Bregman distance beta_d(x, y) = d(y) - d(x) - <grad d(x), y - x> for any
// generator exposing value() and gradient().
template <class Generator>
double bregman_distance(const Generator& d, const Vector& x, const Vector& y) {
  return d.value(y) - d.value(x) - d.gradient(x).dot(y - x);
}

// Euclidean Bregman distance 0.5 ||x - y||_B^2 (d = d_2).
double bregman(const Vector& x, const Vector& y, const Metric& metric);

// How the composite term enters the prox subproblem.
enum class PsiTreatment {
  domain_only,  // argmin over dom psi of h<g, x - c> + beta(c, x)
  penalty,      // argmin of h<g, x - c> + beta(c, x) + h psi(x)
};

struct ProxInfo {
  double residual = 0.0;  // first-order residual of the subproblem (0 for closed forms)
  int inner_iterations = 0;
};

// argmin_x 0.5 ||x - target||_B^2 + weight * psi(x). Closed form for identity and
// diagonal B; dense B falls back to an accelerated inner loop.
Vector metric_prox(const Vector& target, const CompositeTerm& psi, const Metric& metric,
                   double weight, ProxInfo* info = nullptr);

// Proximal gradient step: argmin h<g, x - center> + beta(center, x) [+ h psi(x)].
Vector prox_step(const Vector& center, double h, const Vector& g, const CompositeTerm& psi,
                 const Metric& metric, PsiTreatment treatment = PsiTreatment::domain_only,
                 ProxInfo* info = nullptr);

}  // namespace rgvi
