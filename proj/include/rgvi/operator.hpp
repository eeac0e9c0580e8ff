#pragma once

#include <array>
#include <optional>
#include <string>

#include "rgvi/linalg.hpp"

namespace rgvi {

// Smoothness and monotonicity constants attached to an operator. Indices are
// the natural ones: derivative_bound[k] bounds ||D^k V||, lipschitz[p] is the
// Lipschitz constant of the p-th derivative of f for gradient fields, and
// uniform_monotone[q] is sigma_q in <V(x)-V(y), x-y> >= sigma_q ||x-y||^q.
struct OperatorConstants {
  std::array<std::optional<double>, 4> derivative_bound{};
  std::array<std::optional<double>, 4> lipschitz{};
  std::array<std::optional<double>, 5> uniform_monotone{};
  bool estimated = false;  // true when some constant was obtained by sampling
};

// V(x) = A x + b.
struct AffineMap {
  Matrix a;
  Vector b;
};

// Monotone map V: R^n -> R^n with directional derivatives up to order_cap.
class Operator {
 public:
  Operator(Index dim, int order_cap) : dim_(dim), order_cap_(order_cap) {}
  virtual ~Operator() = default;

  Index dim() const { return dim_; }
  int order_cap() const { return order_cap_; }
  const OperatorConstants& constants() const { return constants_; }
  OperatorConstants& constants() { return constants_; }

  virtual Vector value(const Vector& x) const = 0;
  virtual Matrix jacobian(const Vector& x) const = 0;
  // D^2 V(x)[h1, h2].
  virtual Vector second_derivative(const Vector& x, const Vector& h1, const Vector& h2) const = 0;

  // f(x) when V = grad f.
  virtual std::optional<double> potential(const Vector&) const { return std::nullopt; }
  bool has_potential() const { return potential(Vector::Zero(dim_)).has_value(); }

  // Non-null for affine operators.
  virtual const AffineMap* affine() const { return nullptr; }

  virtual std::string describe() const = 0;

 private:
  Index dim_;
  int order_cap_;
  OperatorConstants constants_;
};

class AffineOperator final : public Operator {
 public:
  // With a symmetric A the operator is the gradient of 0.5<Ax,x> + <b,x> + offset.
  AffineOperator(Matrix a, Vector b, double offset = 0.0);

  Vector value(const Vector& x) const override { return map_.a * x + map_.b; }
  Matrix jacobian(const Vector&) const override { return map_.a; }
  Vector second_derivative(const Vector&, const Vector&, const Vector&) const override {
    return Vector::Zero(dim());
  }
  std::optional<double> potential(const Vector& x) const override;
  const AffineMap* affine() const override { return &map_; }
  std::string describe() const override;

  bool symmetric() const { return symmetric_; }

 private:
  AffineMap map_;
  double offset_;
  bool symmetric_;
};

// Gradient of f(x) = |x_1|^3 + sum_i |x_{i+1} - 2 x_i|^3.
class ChainedCubicGradient final : public Operator {
 public:
  explicit ChainedCubicGradient(Index n);

  double f(const Vector& x) const;
  Vector value(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;
  Vector second_derivative(const Vector& x, const Vector& h1, const Vector& h2) const override;
  std::optional<double> potential(const Vector& x) const override { return f(x); }
  std::string describe() const override;

  const Matrix& links() const { return links_; }

 private:
  Matrix links_;  // rows a_i with l_i(x) = <a_i, x>
};

// A x + b + kappa (x - c) .* |x - c|: a monotone affine map plus a curved,
// uniformly monotone (degree 3) term that vanishes at c.
class CurvedAffineOperator final : public Operator {
 public:
  CurvedAffineOperator(Matrix a, Vector b, Vector center, double kappa);

  Vector value(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;
  Vector second_derivative(const Vector& x, const Vector& h1, const Vector& h2) const override;
  std::string describe() const override;

  double kappa() const { return kappa_; }

 private:
  Matrix a_;
  Vector b_;
  Vector center_;
  double kappa_;
};

}  // namespace rgvi
