#pragma once

#include <string>

#include "rgvi/linalg.hpp"
#include "rgvi/sets.hpp"

namespace rgvi {

enum class CompositeKind { zero, indicator, l1 };

const char* to_string(CompositeKind kind);

// The convex term psi of a composite problem. Three families are supported:
// psi = 0, psi = Ind_Q for a SimpleSet Q, and psi = w * ||x||_1 (domain R^n).
class CompositeTerm {
 public:
  CompositeTerm() = default;

  static CompositeTerm zero(Index dim);
  static CompositeTerm indicator(SimpleSet set);
  static CompositeTerm l1(Index dim, double weight);

  CompositeKind kind() const { return kind_; }
  Index dim() const { return domain_.dim(); }
  const SimpleSet& domain() const { return domain_; }
  double l1_weight() const { return l1_weight_; }

  // True for psi = 0 and for indicators (psi vanishes on its domain).
  bool is_indicator() const { return kind_ != CompositeKind::l1; }
  bool domain_bounded() const { return domain_.bounded(); }

  // +inf off the domain.
  double value(const Vector& x, double tol = 1e-9) const;
  bool in_domain(const Vector& x, double tol = 1e-9) const { return domain_.contains(x, tol); }

  // argmin_x 0.5 ||x - u||_2^2 + weight * psi(x).
  Vector euclidean_prox(const Vector& u, double weight) const;
  // An element of the generalized Jacobian of euclidean_prox at u.
  Matrix euclidean_prox_jacobian(const Vector& u, double weight) const;

  // An element of the subdifferential at x (zero for indicators at any x in the domain).
  Vector subgradient(const Vector& x) const;

  std::string describe() const;

 private:
  CompositeKind kind_ = CompositeKind::zero;
  SimpleSet domain_;
  double l1_weight_ = 0.0;
};

}  // namespace rgvi
