#pragma once

#include <string>

#include "rgvi/problems.hpp"

namespace rgvi {

// Essential-step engines. Minimization steps use the Taylor polynomial of f of
// degree p plus M/(p+1)! ||y - v||^{p+1}; VI steps use the Taylor polynomial of
// V of degree p plus M grad d_{p+2}(y - v).
enum class StepKind { vi_order0, vi_order1, min_order1, min_order2 };

const char* to_string(StepKind kind);
int step_order(StepKind kind);
bool is_minimization_step(StepKind kind);

struct StepConfig {
  StepKind kind = StepKind::vi_order0;
  double M = 0.0;
  double inner_tol = 1e-12;
  int inner_max_iter = 10000;
};

struct StepRecord {
  Vector point;             // T
  Vector reduced_gradient;  // V_psi(T) = V(T) + xi
  Vector operator_value;    // V(T)
  Vector subgradient;       // xi in the subdifferential of psi at T
  double a = 0.0;
  double b = 0.0;
  double r = 0.0;           // ||T - v||_B
  double gnorm = 0.0;       // ||V_psi(T)||_*
  double inner_residual = 0.0;  // ||V(T) - A(T) - V_psi(T)||_*, the model mismatch
  int inner_iterations = 0;
  bool stationary = false;
  bool rounding_floor = false;  // stationary because <V_psi(T), v - T> fell to rounding level
};

struct Stepsize {
  double a = 0.0;
  double b = 0.0;
  bool stationary = false;
};

// a = <g, v - T> / ||g||_*^2 and b = a^2 ||g||_*^2 / 2. g = 0 signals stationarity;
// a <= 0 throws CutViolation.
Stepsize universal_stepsize(const Vector& v, const Vector& t, const Vector& g, const Metric& metric);

// inf_{g > 0} { gamma g^{2/sigma} / 2 + g^{(1 - sigma)/sigma} delta } in closed form.
double tech_lemma_value(double sigma, double gamma, double delta);

// Step-quality constants: <V_psi(T), v - T> >= gamma ||V_psi(T)||_*^{q}.
double gamma_min(int p, double M, double lipschitz);  // q = (p+1)/p
double gamma_vi(int p, double M, double mhat);        // q = (p+2)/(p+1)
double gamma_min_optimal(int p, double lipschitz);    // gamma_min at M = p L_p
double step_quality_exponent(StepKind kind);

double default_min_M(int p, double lipschitz);  // p L_p
double default_vi_M(int p, double mhat);        // (2p+3)/(p+1)! mhat

// Returns the constant the step kind needs (L_p or M-hat_{p+1}); throws
// ConfigurationError when the instance does not record it.
double required_constant(const ProblemInstance& inst, StepKind kind);
// Fills M with its default when M <= 0 and checks the hypotheses on M.
StepConfig resolve_step_config(const ProblemInstance& inst, StepConfig config);
// gamma for the resolved config.
double step_quality_constant(const ProblemInstance& inst, const StepConfig& config);

// Auxiliary monotone problem: find y in dom psi with
//   <G(y), x - y> + psi(x) - psi(y) >= 0,  G(y) = g0 + K s + c ||s||_B^power B s,  s = y - v.
struct AuxiliaryModel {
  Vector center;
  Vector g0;
  Matrix K;  // empty means zero
  double c = 0.0;
  int power = 0;  // 0 or 1
  Vector evaluate(const Vector& y, const Metric& metric) const;
  Matrix jacobian(const Vector& y, const Metric& metric) const;
};

struct AuxiliarySolution {
  Vector point;
  Vector subgradient;  // xi in d psi(point) certified by the final prox
  double residual = 0.0;  // ||G(point) + xi||_*
  int iterations = 0;
};

AuxiliarySolution solve_auxiliary(const AuxiliaryModel& model, const CompositeTerm& psi, const Metric& metric,
                                  double tol, int max_iter);

StepRecord min_tensor_step(const Vector& v, const ProblemInstance& inst, const StepConfig& config);
StepRecord vi_step_order0(const Vector& v, const ProblemInstance& inst, double M);
StepRecord vi_step_order1(const Vector& v, const ProblemInstance& inst, const StepConfig& config);
// Dispatches on config.kind. The config must already be resolved.
StepRecord essential_step(const Vector& v, const ProblemInstance& inst, const StepConfig& config);

}  // namespace rgvi
