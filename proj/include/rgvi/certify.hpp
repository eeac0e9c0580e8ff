#pragma once

#include <cstdint>
#include <string>

#include "rgvi/problems.hpp"

namespace rgvi {

// ---- merit ---------------------------------------------------------------------

enum class MeritMode { automatic, closed_form, inner_solve, sample_lower_bound };
const char* to_string(MeritMode mode);

struct MeritValue {
  double value = 0.0;
  MeritMode mode = MeritMode::automatic;  // mode actually used
  bool exact = false;  // false: value is only a lower bound on the merit
};

// mu_psi(xbar) = psi(xbar) + sup_{x in dom psi} [<V(x), xbar - x> - psi(x)].
// closed_form: affine V with skew-symmetric matrix (support-function reduction);
// inner_solve: affine monotone V (concave quadratic maximization);
// sample_lower_bound: multistart projected ascent for general V.
MeritValue merit(const Vector& xbar, const ProblemInstance& inst, MeritMode mode = MeritMode::automatic,
                 std::uint64_t seed = 11);

// sup over dom psi of <w, x> - weight psi(x), optionally intersected with the
// metric ball ||x - center||_B <= radius. The returned value is an upper bound
// (Lagrangian dual value) and `gap` bounds its distance to the true supremum.
struct SupportQuery {
  double value = 0.0;
  double gap = 0.0;
  Vector argmax;
};
SupportQuery composite_support(const Vector& w, const CompositeTerm& psi, const Metric& metric, double weight,
                               const Vector& center, double radius);

// ---- certificates --------------------------------------------------------------

enum class CertificateKind {
  functional,      // Delta^F: cuts V_psi(x_i), no psi terms
  dual_composite,  // Delta^psi: gradients grad f(x_i) plus psi terms
  variational,     // Delta^V: operator values V(x_i) plus psi terms
};
const char* to_string(CertificateKind kind);

struct CertificateValue {
  double value = kInfinity;
  double gap = 0.0;  // slack of the inner maximization
};

// Running sums for
//   Delta_t = (1/A_t) max_{x in dom psi, ||x - x0|| <= R0} sum_i a_i [<g_i, x_i - x> (+ psi(x_i) - psi(x))].
class CertificateAccumulator {
 public:
  CertificateAccumulator(CertificateKind kind, const ProblemInstance& inst, double R0);

  CertificateKind kind() const { return kind_; }
  double R0() const { return R0_; }
  double A() const { return A_; }
  const Vector& linear() const { return linear_; }
  double scalar() const { return scalar_; }
  double psi_sum() const { return psi_sum_; }

  // g is V_psi(x) for the functional kind and V(x) otherwise.
  void add(double a, const Vector& x, const Vector& g);
  CertificateValue value() const;

 private:
  CertificateKind kind_;
  const ProblemInstance* inst_;
  double R0_;
  double A_ = 0.0;
  Vector linear_;
  double scalar_ = 0.0;
  double psi_sum_ = 0.0;
};

// R0 used by certificates: the recorded bound for bounded domains, otherwise
// ||x0 - x*||_B when x* is known. Throws ConfigurationError if neither exists.
double default_certificate_radius(const ProblemInstance& inst);

}  // namespace rgvi
