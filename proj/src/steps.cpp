#include "rgvi/steps.hpp"

#include <cmath>
#include <limits>

#include "rgvi/errors.hpp"

namespace rgvi {

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::vi_order0: return "vi_order0";
    case StepKind::vi_order1: return "vi_order1";
    case StepKind::min_order1: return "min_order1";
    case StepKind::min_order2: return "min_order2";
  }
  return "unknown";
}

int step_order(StepKind kind) {
  switch (kind) {
    case StepKind::vi_order0: return 0;
    case StepKind::vi_order1: return 1;
    case StepKind::min_order1: return 1;
    case StepKind::min_order2: return 2;
  }
  return 0;
}

bool is_minimization_step(StepKind kind) {
  return kind == StepKind::min_order1 || kind == StepKind::min_order2;
}

Stepsize universal_stepsize(const Vector& v, const Vector& t, const Vector& g, const Metric& metric) {
  if (!all_finite(v) || !all_finite(t) || !all_finite(g)) throw InvalidInput("universal_stepsize: non-finite input");
  const double gn2 = g.dot(metric.apply_inverse(g));
  Stepsize out;
  if (gn2 == 0.0) {
    out.stationary = true;
    return out;
  }
  const double ip = g.dot(v - t);
  if (!(ip > 0.0)) throw CutViolation("universal_stepsize: <g, v - T> <= 0", ip);
  out.a = ip / gn2;
  out.b = 0.5 * out.a * out.a * gn2;
  return out;
}

double tech_lemma_value(double sigma, double gamma, double delta) {
  if (!(sigma >= 1.0) || !(gamma > 0.0) || !(delta >= 0.0) || !std::isfinite(sigma) || !std::isfinite(gamma) ||
      !std::isfinite(delta))
    throw InvalidInput("tech_lemma_value: need sigma >= 1, gamma > 0, delta >= 0");
  if (sigma == 1.0) return delta;
  return 0.5 * (sigma + 1.0) * std::pow(gamma / (sigma - 1.0), (sigma - 1.0) / (sigma + 1.0)) *
         std::pow(delta, 2.0 / (1.0 + sigma));
}

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double gamma_min(int p, double M, double lipschitz) {
  if (p < 1) throw InvalidInput("gamma_min: p must be >= 1");
  if (!(lipschitz >= 0.0) || !(M >= lipschitz) || !(M > 0.0)) throw InvalidInput("gamma_min: need M >= L_p >= 0");
  if (p == 1) return 1.0 / (M + lipschitz);
  const double pd = p;
  return (pd / M) * std::pow(factorial(p) / (pd + 1.0), 1.0 / pd) *
         std::pow((M * M - lipschitz * lipschitz) / (pd * pd - 1.0), (pd - 1.0) / (2.0 * pd));
}

double gamma_vi(int p, double M, double mhat) {
  if (p < 0) throw InvalidInput("gamma_vi: p must be >= 0");
  const double m = mhat / factorial(p + 1);
  if (!(mhat >= 0.0) || !(M >= m) || !(M > 0.0)) throw InvalidInput("gamma_vi: need M >= M-hat/(p+1)!");
  return (M - m) * std::pow(M + m, -(p + 2.0) / (p + 1.0));
}

double gamma_min_optimal(int p, double lipschitz) {
  if (p < 1 || !(lipschitz > 0.0)) throw InvalidInput("gamma_min_optimal: need p >= 1, L_p > 0");
  return std::pow(factorial(p) / ((p + 1.0) * lipschitz), 1.0 / p);
}

double step_quality_exponent(StepKind kind) {
  const double p = step_order(kind);
  return is_minimization_step(kind) ? (p + 1.0) / p : (p + 2.0) / (p + 1.0);
}

double default_min_M(int p, double lipschitz) { return p * lipschitz; }

double default_vi_M(int p, double mhat) { return (2.0 * p + 3.0) / factorial(p + 1) * mhat; }

namespace {

std::optional<double> constant_for(const ProblemInstance& inst, StepKind kind) {
  const int p = step_order(kind);
  const auto& c = inst.constants();
  return is_minimization_step(kind) ? c.lipschitz[p] : c.derivative_bound[p + 1];
}

}  // namespace

double required_constant(const ProblemInstance& inst, StepKind kind) {
  const auto c = constant_for(inst, kind);
  if (!c) {
    const int p = step_order(kind);
    throw ConfigurationError(std::string(to_string(kind)) + ": instance '" + inst.name + "' records no " +
                             (is_minimization_step(kind) ? "L_" + std::to_string(p)
                                                         : "M-hat_" + std::to_string(p + 1)));
  }
  return *c;
}

StepConfig resolve_step_config(const ProblemInstance& inst, StepConfig config) {
  if (!(config.inner_tol > 0.0) || config.inner_max_iter < 1)
    throw ConfigurationError("step: inner_tol must be positive and inner_max_iter >= 1");
  if (is_minimization_step(config.kind) && inst.problem_class != ProblemClass::minimization)
    throw ConfigurationError(std::string(to_string(config.kind)) + ": instance '" + inst.name +
                             "' is not a minimization problem");
  const int p = step_order(config.kind);
  if (!std::isfinite(config.M)) throw ConfigurationError("step: M must be finite");
  const auto c = constant_for(inst, config.kind);
  if (config.M <= 0.0) {
    const double k = required_constant(inst, config.kind);
    config.M = is_minimization_step(config.kind) ? default_min_M(p, k) : default_vi_M(p, k);
    if (!(config.M > 0.0))
      throw ConfigurationError(std::string(to_string(config.kind)) + ": default M is zero for '" + inst.name +
                               "'; set M explicitly");
  }
  if (c) {
    const double lower = is_minimization_step(config.kind) ? p * *c : *c / factorial(p);
    if (config.M < lower * (1.0 - 1e-12))
      throw ConfigurationError(std::string(to_string(config.kind)) + ": M = " + std::to_string(config.M) +
                               " is below the required " + std::to_string(lower));
  }
  return config;
}

double step_quality_constant(const ProblemInstance& inst, const StepConfig& config) {
  const double k = required_constant(inst, config.kind);
  const int p = step_order(config.kind);
  return is_minimization_step(config.kind) ? gamma_min(p, config.M, k) : gamma_vi(p, config.M, k);
}

// ---- auxiliary problem ---------------------------------------------------------

Vector AuxiliaryModel::evaluate(const Vector& y, const Metric& metric) const {
  const Vector s = y - center;
  Vector g = g0;
  if (K.size() != 0) g.noalias() += K * s;
  const Vector bs = metric.apply(s);
  const double w = power == 0 ? c : c * std::sqrt(std::max(0.0, s.dot(bs)));
  g += w * bs;
  return g;
}

Matrix AuxiliaryModel::jacobian(const Vector& y, const Metric& metric) const {
  const Index n = y.size();
  const Vector s = y - center;
  const Matrix b = metric.matrix();
  Matrix j = K.size() != 0 ? K : Matrix::Zero(n, n);
  if (power == 0) {
    j += c * b;
  } else {
    const Vector bs = b * s;
    const double r = std::sqrt(std::max(0.0, s.dot(bs)));
    j += c * r * b;
    if (r > 0.0) j += (c / r) * bs * bs.transpose();
  }
  return j;
}

namespace {

bool trivial_psi(const CompositeTerm& psi) { return psi.is_indicator() && psi.domain().is_whole_space(); }

double operator_norm_bound(const Matrix& k) { return k.size() == 0 ? 0.0 : k.norm(); }

AuxiliarySolution solve_unconstrained(const AuxiliaryModel& model, const Metric& metric) {
  const Index n = model.g0.size();
  AuxiliarySolution out;
  out.subgradient = Vector::Zero(n);
  const double g0n = metric.dual_norm(model.g0);
  auto solve_for = [&](double weight) -> Vector {
    if (model.K.size() == 0) return -metric.apply_inverse(model.g0) / weight;
    Matrix a = model.K + weight * metric.matrix();
    return a.partialPivLu().solve(-model.g0);
  };
  if (g0n == 0.0) {
    out.point = model.center;
  } else if (model.power == 0) {
    out.point = model.center + solve_for(model.c);
    out.iterations = 1;
  } else {
    // ||s(r)||_B - r is strictly decreasing for s(r) = -(K + c r B)^{-1} g0.
    double lo = 0.0;
    double hi = std::sqrt(g0n / model.c) * (1.0 + 1e-12);
    Vector s_hi = solve_for(model.c * hi);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Vector s = solve_for(model.c * mid);
      ++out.iterations;
      if (!all_finite(s) || metric.norm(s) > mid) {
        lo = mid;
      } else {
        hi = mid;
        s_hi = s;
      }
    }
    out.point = model.center + s_hi;
  }
  out.residual = metric.dual_norm(model.evaluate(out.point, metric));
  return out;
}

AuxiliarySolution solve_natural_map(const AuxiliaryModel& model, const CompositeTerm& psi, const Metric& metric,
                                    double tol, int max_iter) {
  const Index n = model.g0.size();
  const double g0n = metric.dual_norm(model.g0);
  const double radius = model.power == 0 ? 1.0 : std::max(std::sqrt(g0n / model.c), 1e-8);
  double lip = operator_norm_bound(model.K) + 2.0 * model.c * metric.max_eigenvalue() * radius;
  if (!(lip > 0.0)) lip = 1.0;
  const double tau = 1.0 / lip;
  const double target = tol * (1.0 + g0n);

  auto prox = [&](const Vector& u, double h) { return psi.euclidean_prox(u, h); };
  struct Eval {
    Vector f;        // natural map y - P(y - tau G(y))
    Vector t;        // P(y - tau G(y))
    Vector xi;
    double residual;
  };
  auto eval = [&](const Vector& y) {
    Eval e;
    const Vector u = y - tau * model.evaluate(y, metric);
    e.t = prox(u, tau);
    e.f = y - e.t;
    e.xi = (u - e.t) / tau;
    e.residual = metric.dual_norm(model.evaluate(e.t, metric) + e.xi);
    return e;
  };

  AuxiliarySolution best;
  best.residual = kInfinity;
  Vector y = prox(model.center - tau * model.g0, tau);
  Eval cur = eval(y);
  double h_eg = tau;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (cur.residual < best.residual) {
      best.point = cur.t;
      best.subgradient = cur.xi;
      best.residual = cur.residual;
    }
    if (cur.residual <= target) break;

    bool accepted = false;
    const Vector u = y - tau * model.evaluate(y, metric);
    const Matrix jp = psi.euclidean_prox_jacobian(u, tau);
    const Matrix jf = Matrix::Identity(n, n) - jp * (Matrix::Identity(n, n) - tau * model.jacobian(y, metric));
    const Vector d = jf.partialPivLu().solve(-cur.f);
    if (all_finite(d)) {
      const double theta = cur.f.squaredNorm();
      double alpha = 1.0;
      for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
        const Vector yn = y + alpha * d;
        Eval next = eval(yn);
        if (next.f.squaredNorm() <= (1.0 - 1e-4 * alpha) * theta) {
          y = yn;
          cur = std::move(next);
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      // Extragradient step from the feasible point with Lipschitz backtracking.
      const Vector x = cur.t;
      const Vector gx = model.evaluate(x, metric);
      for (int ls = 0; ls < 60; ++ls) {
        const Vector z = prox(x - h_eg * gx, h_eg);
        const Vector gz = model.evaluate(z, metric);
        if (h_eg * (gz - gx).norm() <= 0.9 * (z - x).norm() || (z - x).norm() == 0.0) {
          y = prox(x - h_eg * gz, h_eg);
          h_eg *= 1.2;
          break;
        }
        h_eg *= 0.5;
      }
      cur = eval(y);
    }
  }
  best.iterations = it;
  if (cur.residual < best.residual) {
    best.point = cur.t;
    best.subgradient = cur.xi;
    best.residual = cur.residual;
  }
  if (!(best.residual <= target))
    throw StepFailure("auxiliary solve: residual " + std::to_string(best.residual) + " above tolerance after " +
                          std::to_string(it) + " iterations",
                      best.residual);
  return best;
}

}  // namespace

AuxiliarySolution solve_auxiliary(const AuxiliaryModel& model, const CompositeTerm& psi, const Metric& metric,
                                  double tol, int max_iter) {
  if (!(model.c > 0.0)) throw InvalidInput("solve_auxiliary: c must be positive");
  if (model.power != 0 && model.power != 1) throw InvalidInput("solve_auxiliary: power must be 0 or 1");
  if (trivial_psi(psi)) return solve_unconstrained(model, metric);
  return solve_natural_map(model, psi, metric, tol, max_iter);
}

// ---- steps ---------------------------------------------------------------------

namespace {

void check_point(const Vector& v, const ProblemInstance& inst, const char* who) {
  if (v.size() != inst.dim()) throw InvalidInput(std::string(who) + ": dimension mismatch");
  if (!all_finite(v)) throw InvalidInput(std::string(who) + ": non-finite point");
  if (!inst.psi.in_domain(v, 1e-9)) throw InvalidInput(std::string(who) + ": v outside dom psi");
}

StepRecord model_step(const Vector& v, const ProblemInstance& inst, const Vector& g0, Matrix k, double c,
                      int power, double tol, int max_iter) {
  const Metric& metric = inst.metric;
  const CompositeTerm& psi = inst.psi;
  AuxiliarySolution sol;
  if (k.size() == 0 && power == 0 && metric.is_diagonal()) {
    // Closed form: T = prox_{v, 1/c}(g0) with psi as a penalty.
    sol.point = prox_step(v, 1.0 / c, g0, psi, metric, PsiTreatment::penalty);
    if (trivial_psi(psi)) {
      sol.subgradient = Vector::Zero(v.size());
    } else {
      sol.subgradient = -g0 - c * metric.apply(sol.point - v);
    }
    AuxiliaryModel model{v, g0, Matrix(), c, 0};
    sol.residual = metric.dual_norm(model.evaluate(sol.point, metric) + sol.subgradient);
  } else {
    AuxiliaryModel model{v, g0, std::move(k), c, power};
    sol = solve_auxiliary(model, psi, metric, tol, max_iter);
  }

  StepRecord rec;
  rec.point = std::move(sol.point);
  rec.subgradient = std::move(sol.subgradient);
  rec.operator_value = inst.op->value(rec.point);
  rec.reduced_gradient = rec.operator_value + rec.subgradient;
  rec.inner_residual = sol.residual;
  rec.inner_iterations = sol.iterations;
  rec.r = metric.norm(rec.point - v);
  rec.gnorm = metric.dual_norm(rec.reduced_gradient);
  const double threshold = 1e-13 * (1.0 + metric.dual_norm(g0)) + 10.0 * rec.inner_residual;
  if (rec.gnorm <= threshold) {
    rec.stationary = true;
    return rec;
  }
  // The sign of <g, v - T> is unresolvable below this level; g carries an
  // absolute error of order eps (||V(v)||_* + ||V(T)||_* + ||xi||_*).
  const double noise = metric.dual_norm(g0) + metric.dual_norm(rec.operator_value) + metric.dual_norm(rec.subgradient);
  const double cut_floor = (64.0 * kEpsilon * noise + 10.0 * rec.inner_residual) * rec.r;
  if (rec.reduced_gradient.dot(v - rec.point) <= cut_floor) {
    rec.stationary = true;
    rec.rounding_floor = true;
    return rec;
  }
  const Stepsize st = universal_stepsize(v, rec.point, rec.reduced_gradient, metric);
  rec.a = st.a;
  rec.b = st.b;
  rec.stationary = st.stationary;
  return rec;
}

}  // namespace

StepRecord min_tensor_step(const Vector& v, const ProblemInstance& inst, const StepConfig& config) {
  check_point(v, inst, "min_tensor_step");
  if (!is_minimization_step(config.kind)) throw ConfigurationError("min_tensor_step: not a minimization step kind");
  const int p = step_order(config.kind);
  if (!(config.M > 0.0)) throw ConfigurationError("min_tensor_step: M must be positive");
  if (const auto l = inst.constants().lipschitz[p]; l && config.M < p * *l * (1.0 - 1e-12))
    throw ConfigurationError("min_tensor_step: M < p L_p");
  const Vector g0 = inst.op->value(v);
  if (p == 1) return model_step(v, inst, g0, Matrix(), config.M, 0, config.inner_tol, config.inner_max_iter);
  return model_step(v, inst, g0, inst.op->jacobian(v), 0.5 * config.M, 1, config.inner_tol, config.inner_max_iter);
}

StepRecord vi_step_order0(const Vector& v, const ProblemInstance& inst, double M) {
  check_point(v, inst, "vi_step_order0");
  if (!(M > 0.0)) throw ConfigurationError("vi_step_order0: M must be positive");
  if (const auto m = inst.constants().derivative_bound[1]; m && M < *m * (1.0 - 1e-12))
    throw ConfigurationError("vi_step_order0: M < M-hat_1");
  return model_step(v, inst, inst.op->value(v), Matrix(), M, 0, 1e-12, 10000);
}

StepRecord vi_step_order1(const Vector& v, const ProblemInstance& inst, const StepConfig& config) {
  check_point(v, inst, "vi_step_order1");
  if (!(config.M > 0.0)) throw ConfigurationError("vi_step_order1: M must be positive");
  if (inst.op->order_cap() < 1) throw ConfigurationError("vi_step_order1: operator has no Jacobian");
  if (const auto m = inst.constants().derivative_bound[2]; m && config.M < *m * (1.0 - 1e-12))
    throw ConfigurationError("vi_step_order1: M < M-hat_2");
  return model_step(v, inst, inst.op->value(v), inst.op->jacobian(v), config.M, 1, config.inner_tol,
                    config.inner_max_iter);
}

StepRecord essential_step(const Vector& v, const ProblemInstance& inst, const StepConfig& config) {
  switch (config.kind) {
    case StepKind::vi_order0:
      return vi_step_order0(v, inst, config.M);
    case StepKind::vi_order1:
      return vi_step_order1(v, inst, config);
    case StepKind::min_order1:
    case StepKind::min_order2:
      return min_tensor_step(v, inst, config);
  }
  throw ConfigurationError("essential_step: unknown kind");
}

}  // namespace rgvi
