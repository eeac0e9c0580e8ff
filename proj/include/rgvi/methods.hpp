#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "rgvi/certify.hpp"
#include "rgvi/steps.hpp"

namespace rgvi {

enum class Scheme { primal, dual, projecting, uniform_monotone, switching, baseline_gradient, baseline_extragradient };

const char* to_string(Scheme scheme);
// Throws InvalidInput for unknown names.
Scheme parse_scheme(const std::string& name);

struct MethodConfig {
  Scheme scheme = Scheme::primal;
  StepConfig step;
  int iterations = 500;
  int log_every = 1;  // cadence of certificate / merit evaluation; 0 disables both
  bool compute_certificate = true;
  bool compute_merit = false;
  bool store_points = true;
  double stop_gnorm = 0.0;        // stop when ||V_psi(x_t)||_* <= stop_gnorm (0: off)
  double stop_certificate = 0.0;  // stop when the certificate drops below this (0: off)
  double R0 = 0.0;                // certificate radius; 0 uses the instance default
  int stage_length = 0;           // switching scheme: t, with N = 2t; 0 uses iterations / 2
  double lipschitz = 0.0;         // baselines: L; 0 uses the instance's M-hat_1
  double extragradient_h = 0.0;   // 0 uses 1/(sqrt(2) L)
  std::vector<int> windows;       // baseline gradient: window indices m (default 50, 100, 200 when reached)
};

constexpr double kNotAvailable = std::numeric_limits<double>::quiet_NaN();

struct IterationRecord {
  int t = 0;
  int stage = 0;  // switching scheme: 1 or 2
  Vector v;       // prox-center v_t (empty unless store_points)
  Vector x;       // x_t (empty unless store_points)
  double a = 0.0;
  double b = 0.0;
  double A = 0.0;
  double B = 0.0;
  double gnorm = kNotAvailable;       // ||V_psi(x_t)||_*
  double gnorm_best = kNotAvailable;  // min_{i <= t} ||V_psi(x_i)||_*
  double dist_v = kNotAvailable;      // ||v_t - x*||_B
  double dist_x = kNotAvailable;      // ||x_t - x*||_B
  double merit = kNotAvailable;       // merit of the averaged point
  bool merit_exact = false;
  double certificate = kNotAvailable;
  double certificate_alt = kNotAvailable;  // minimization: the other certificate variant
  double certificate_gap = 0.0;
  double theorem_lhs = kNotAvailable;
  double theorem_rhs = kNotAvailable;
  double theorem_tol = 0.0;
  double inner_residual = 0.0;
  double quality_lhs = kNotAvailable;  // <V_psi(x_t), v_{t-1} - x_t>
  double quality_rhs = kNotAvailable;  // gamma ||V_psi(x_t)||_*^q
  double objective = kNotAvailable;        // F(x_t)
  double objective_tilde = kNotAvailable;  // (1/A_t) sum a_i F(x_i)
  double objective_best = kNotAvailable;   // min_{i <= t} F(x_i)
  double aux = kNotAvailable;  // scheme specific (see README)
  double wall_time = 0.0;

  double theorem_slack() const { return theorem_rhs - theorem_lhs; }
};

struct WindowRecord {
  int m = 0;
  double merit = 0.0;
  bool merit_exact = false;
  double lemma_bound = 0.0;
  double rate_bound = 0.0;
  Vector point;
};

struct RunTrace {
  std::string instance;
  Scheme scheme = Scheme::primal;
  StepConfig step;
  std::vector<IterationRecord> records;
  std::vector<WindowRecord> windows;
  Vector x_bar;
  Vector v_last;
  std::string stop_reason;
  double R0 = kNotAvailable;
  double gamma = kNotAvailable;  // step-quality constant
  double alpha = kNotAvailable;  // uniformly monotone scheme
  int theorem_violations = 0;
  double worst_theorem_excess = 0.0;  // max over t of (lhs - rhs - tol), clipped at 0
  int quality_violations = 0;
  double worst_quality_excess = 0.0;
  std::map<std::string, double> summary;
};

RunTrace run_primal(const ProblemInstance& inst, const MethodConfig& config);
RunTrace run_dual(const ProblemInstance& inst, const MethodConfig& config);
RunTrace run_projecting(const ProblemInstance& inst, const MethodConfig& config);
RunTrace run_uniform_monotone(const ProblemInstance& inst, const MethodConfig& config);
RunTrace run_switching(const ProblemInstance& inst, const MethodConfig& config);
RunTrace run_baseline_gradient(const ProblemInstance& inst, const MethodConfig& config);
RunTrace run_baseline_extragradient(const ProblemInstance& inst, const MethodConfig& config);
RunTrace run_method(const ProblemInstance& inst, const MethodConfig& config);

// B-projection of v onto dom psi intersected with {x : <g, x - x_cut> <= 0}
// (psi an indicator). Returns v itself when v already satisfies the cut.
struct CutProjection {
  Vector point;
  double multiplier = 0.0;
  bool active = false;
};
CutProjection project_onto_cut(const Vector& v, const Vector& g, const Vector& x_cut, const CompositeTerm& psi,
                               const Metric& metric);

}  // namespace rgvi
