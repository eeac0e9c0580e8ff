#include "rgvi/methods.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "rgvi/bounds.hpp"
#include "rgvi/errors.hpp"

namespace rgvi {

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::primal: return "primal";
    case Scheme::dual: return "dual";
    case Scheme::projecting: return "projecting";
    case Scheme::uniform_monotone: return "uniform_monotone";
    case Scheme::switching: return "switching";
    case Scheme::baseline_gradient: return "baseline_gradient";
    case Scheme::baseline_extragradient: return "baseline_extragradient";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::primal, Scheme::dual, Scheme::projecting, Scheme::uniform_monotone, Scheme::switching,
                   Scheme::baseline_gradient, Scheme::baseline_extragradient})
    if (name == to_string(s)) return s;
  throw InvalidInput("unknown scheme '" + name + "'");
}

CutProjection project_onto_cut(const Vector& v, const Vector& g, const Vector& x_cut, const CompositeTerm& psi,
                               const Metric& metric) {
  if (!psi.is_indicator()) throw Unsupported("project_onto_cut: psi must be an indicator");
  CutProjection out;
  const double level = g.dot(x_cut);
  const double excess = g.dot(v) - level;
  if (excess <= 0.0) {
    out.point = v;
    return out;
  }
  out.active = true;
  const Vector binv_g = metric.apply_inverse(g);
  const double gn2 = g.dot(binv_g);
  if (gn2 == 0.0) throw InvalidInput("project_onto_cut: zero cut normal");
  if (psi.domain().is_whole_space()) {
    out.multiplier = excess / gn2;
    out.point = v - out.multiplier * binv_g;
    return out;
  }
  auto point = [&](double lam) { return metric_prox(v - lam * binv_g, psi, metric, 1.0); };
  const double tol = 1e-15 * (std::abs(level) + g.cwiseAbs().dot(x_cut.cwiseAbs()) + 1.0);
  double hi = excess / gn2;
  Vector x_hi = point(hi);
  for (int k = 0; k < 200 && g.dot(x_hi) - level > tol; ++k) {
    hi *= 2.0;
    x_hi = point(hi);
  }
  double lo = 0.0;
  for (int k = 0; k < 200 && hi - lo > 1e-16 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    const Vector x = point(mid);
    if (g.dot(x) - level > tol) {
      lo = mid;
    } else {
      hi = mid;
      x_hi = x;
    }
  }
  out.point = x_hi;
  out.multiplier = hi;
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_common(const ProblemInstance& inst, const MethodConfig& cfg) {
  if (cfg.iterations < 1) throw ConfigurationError("method.iterations must be >= 1");
  if (cfg.log_every < 0) throw ConfigurationError("method.log_every must be >= 0");
  if (!inst.psi.in_domain(inst.x0, 1e-9)) throw InvalidInput("method: x0 outside dom psi");
}

std::optional<double> try_radius(const ProblemInstance& inst, const MethodConfig& cfg) {
  if (cfg.R0 > 0.0) return cfg.R0;
  try {
    return default_certificate_radius(inst);
  } catch (const ConfigurationError&) {
    return std::nullopt;
  }
}

void note_merit(IterationRecord& rec, const Vector& point, const ProblemInstance& inst) {
  try {
    const MeritValue m = merit(point, inst);
    rec.merit = m.value;
    rec.merit_exact = m.exact;
  } catch (const Unsupported&) {
  }
}

bool log_due(const MethodConfig& cfg, int t, int last) {
  return cfg.log_every > 0 && (t % cfg.log_every == 0 || t == last);
}

void store(IterationRecord& rec, const MethodConfig& cfg, const Vector& v, const Vector& x) {
  if (!cfg.store_points) return;
  rec.v = v;
  rec.x = x;
}

// Primal, dual, projecting and uniformly monotone schemes share this loop;
// they differ only in the prox-center update and the inequality checked.
RunTrace run_reduced_gradient(const ProblemInstance& inst, const MethodConfig& cfg, Scheme scheme) {
  check_common(inst, cfg);
  const Clock::time_point start = Clock::now();
  const Metric& metric = inst.metric;
  const CompositeTerm& psi = inst.psi;

  RunTrace trace;
  trace.instance = inst.name;
  trace.scheme = scheme;
  trace.step = resolve_step_config(inst, cfg.step);
  const StepConfig& step = trace.step;
  const int p = step_order(step.kind);
  const bool minimization = inst.problem_class == ProblemClass::minimization;
  const bool has_potential = minimization && inst.op->has_potential();
  try {
    trace.gamma = step_quality_constant(inst, step);
  } catch (const ConfigurationError&) {
  }
  const double q = step_quality_exponent(step.kind);

  if (scheme == Scheme::projecting && !psi.is_indicator())
    throw Unsupported("projecting scheme needs psi to be an indicator (got " + psi.describe() + ")");
  double alpha = 0.0;
  if (scheme == Scheme::uniform_monotone) {
    if (is_minimization_step(step.kind)) throw ConfigurationError("uniform_monotone scheme needs a VI step");
    if (!metric.is_identity()) throw ConfigurationError("uniform_monotone scheme needs the Euclidean metric");
    const auto sigma = inst.constants().uniform_monotone[p + 2];
    if (!sigma || !(*sigma > 0.0))
      throw ConfigurationError("uniform_monotone: instance '" + inst.name + "' records no positive sigma_" +
                               std::to_string(p + 2));
    alpha = alpha_uniform(p, gamma_vi(p, step.M, required_constant(inst, step.kind)), *sigma);
    trace.alpha = alpha;
  }

  const bool has_star = inst.x_star.has_value();
  const Vector xs = has_star ? *inst.x_star : Vector();
  const double beta0 = has_star ? bregman(inst.x0, xs, metric) : kNotAvailable;

  std::optional<CertificateAccumulator> cert;
  std::optional<CertificateAccumulator> cert_alt;
  if (cfg.compute_certificate && cfg.log_every > 0) {
    if (const auto r0 = try_radius(inst, cfg)) {
      trace.R0 = *r0;
      if (!minimization) {
        cert.emplace(CertificateKind::variational, inst, *r0);
      } else {
        const bool dual_first = scheme == Scheme::dual;
        cert.emplace(dual_first ? CertificateKind::dual_composite : CertificateKind::functional, inst, *r0);
        cert_alt.emplace(dual_first ? CertificateKind::functional : CertificateKind::dual_composite, inst, *r0);
      }
    }
  }

  IterationRecord first;
  store(first, cfg, inst.x0, inst.x0);
  if (has_star) first.dist_v = first.dist_x = metric.norm(inst.x0 - xs);
  if (has_potential) first.objective = inst.objective(inst.x0);
  trace.records.push_back(first);

  Vector v = inst.x0;
  Vector s = Vector::Zero(inst.dim());  // dual aggregate sum a_i V(x_i)
  Vector x_weighted = Vector::Zero(inst.dim());
  double A = 0.0, B = 0.0;
  double sum_cut = 0.0;    // sum a_i <V_psi(x_i), x_i - x*>
  double sum_psi = 0.0;    // sum a_i psi(x_i)
  double sum_vx = 0.0;     // sum a_i <V(x_i), x_i>
  double sum_f = 0.0;      // sum a_i F(x_i)
  double best_f = kInfinity;
  double best_g = kInfinity;
  double max_res = 0.0;
  double magnitude = 0.0;
  Vector last_point = inst.x0;
  trace.stop_reason = "budget";

  for (int t = 1; t <= cfg.iterations; ++t) {
    StepRecord rec;
    try {
      rec = essential_step(v, inst, step);
    } catch (const StepFailure& e) {
      trace.stop_reason = std::string("step_failure: ") + e.what();
      break;
    } catch (const CutViolation& e) {
      trace.stop_reason = std::string("cut_violation: ") + e.what();
      break;
    }
    IterationRecord r;
    r.t = t;
    r.inner_residual = rec.inner_residual;
    r.gnorm = rec.gnorm;
    best_g = std::min(best_g, rec.gnorm);
    r.gnorm_best = best_g;
    last_point = rec.point;
    max_res = std::max(max_res, rec.inner_residual);
    if (rec.stationary) {
      r.A = A;
      r.B = B;
      store(r, cfg, v, rec.point);
      if (has_star) {
        r.dist_v = metric.norm(v - xs);
        r.dist_x = metric.norm(rec.point - xs);
      }
      if (has_potential) r.objective = inst.objective(rec.point);
      r.wall_time = seconds_since(start);
      trace.records.push_back(r);
      trace.stop_reason = rec.rounding_floor ? "rounding_floor" : "stationary";
      break;
    }

    const Vector& T = rec.point;
    const Vector& g = rec.reduced_gradient;
    const double a = rec.a;
    A += a;
    B += rec.b;
    x_weighted += a * T;
    r.a = a;
    r.b = rec.b;
    r.A = A;
    r.B = B;
    r.quality_lhs = g.dot(v - T);
    if (std::isfinite(trace.gamma)) {
      r.quality_rhs = trace.gamma * std::pow(rec.gnorm, q);
      const double excess = r.quality_rhs - r.quality_lhs - (rec.inner_residual + 1e-6);
      if (excess > 0.0) {
        ++trace.quality_violations;
        trace.worst_quality_excess = std::max(trace.worst_quality_excess, excess);
      }
    }
    if (has_star) sum_cut += a * g.dot(T - xs);
    const double psi_t = psi.value(T, 1e-8);
    sum_psi += a * psi_t;
    sum_vx += a * rec.operator_value.dot(T);
    magnitude += a * (metric.dual_norm(g) + metric.dual_norm(rec.operator_value)) * (1.0 + metric.norm(T) + metric.norm(v));

    const Vector v_prev = v;
    switch (scheme) {
      case Scheme::primal:
        v = prox_step(v, a, g, psi, metric, PsiTreatment::domain_only);
        break;
      case Scheme::dual:
        s += a * rec.operator_value;
        v = prox_step(inst.x0, A, s / A, psi, metric, PsiTreatment::penalty);
        break;
      case Scheme::projecting: {
        const CutProjection cp = project_onto_cut(v, g, T, psi, metric);
        v = cp.point;
        r.aux = cp.active ? std::abs(g.dot(T - v)) / (metric.dual_norm(g) * std::max(1.0, metric.norm(T))) : 0.0;
        break;
      }
      case Scheme::uniform_monotone: {
        const Vector vhat = prox_step(v, a, g, psi, metric, PsiTreatment::domain_only);
        v = (vhat + alpha * T) / (1.0 + alpha);
        break;
      }
      default:
        throw ConfigurationError("run_reduced_gradient: unsupported scheme");
    }

    // Theorem inequality for this scheme.
    switch (scheme) {
      case Scheme::primal:
        if (has_star) {
          r.theorem_lhs = sum_cut + B + bregman(v, xs, metric);
          r.theorem_rhs = beta0;
        }
        break;
      case Scheme::dual:
        r.theorem_lhs = sum_psi + B;
        r.theorem_rhs = bregman(inst.x0, v, metric) + s.dot(v) - sum_vx + A * psi.value(v, 1e-8);
        break;
      case Scheme::projecting:
        if (has_star) {
          r.theorem_lhs = bregman(v, xs, metric) + B;
          r.theorem_rhs = beta0;
        }
        break;
      case Scheme::uniform_monotone:
        if (has_star) {
          const double d2 = std::pow(metric.norm(v - xs), 2);
          const double d2_prev = std::pow(metric.norm(v_prev - xs), 2);
          r.theorem_lhs = d2;
          r.theorem_rhs = std::pow(1.0 + alpha, -t) * 2.0 * beta0;
          r.aux = d2_prev > 0.0 ? d2 * (1.0 + alpha) / d2_prev : 0.0;
        }
        break;
      default:
        break;
    }
    if (std::isfinite(r.theorem_lhs)) {
      r.theorem_tol = t * (max_res + 1e-10) * (1.0 + std::abs(r.theorem_rhs)) + 1e-13 * magnitude;
      if (scheme == Scheme::uniform_monotone) r.theorem_tol = 1e-8 * r.theorem_rhs + 1e-13 * magnitude;
      const double excess = r.theorem_lhs - r.theorem_rhs - r.theorem_tol;
      if (excess > 0.0) {
        ++trace.theorem_violations;
        trace.worst_theorem_excess = std::max(trace.worst_theorem_excess, excess);
      }
    }

    if (has_star) {
      r.dist_v = metric.norm(v - xs);
      r.dist_x = metric.norm(T - xs);
    }
    if (has_potential) {
      const double f = inst.objective(T);
      r.objective = f;
      sum_f += a * f;
      best_f = std::min(best_f, f);
      r.objective_tilde = sum_f / A;
      r.objective_best = best_f;
    }
    if (cert) {
      cert->add(a, T, cert->kind() == CertificateKind::functional ? g : rec.operator_value);
      if (cert_alt) cert_alt->add(a, T, cert_alt->kind() == CertificateKind::functional ? g : rec.operator_value);
    }
    if (log_due(cfg, t, cfg.iterations)) {
      if (cert) {
        try {
          const CertificateValue cv = cert->value();
          r.certificate = cv.value;
          r.certificate_gap = cv.gap;
          if (cert_alt) r.certificate_alt = cert_alt->value().value;
        } catch (const Unsupported&) {
        }
      }
      if (cfg.compute_merit) note_merit(r, x_weighted / A, inst);
    }
    store(r, cfg, v, T);
    r.wall_time = seconds_since(start);
    trace.records.push_back(r);

    if (cfg.stop_gnorm > 0.0 && rec.gnorm <= cfg.stop_gnorm) {
      trace.stop_reason = "gnorm_threshold";
      break;
    }
    if (cfg.stop_certificate > 0.0 && std::isfinite(r.certificate) && r.certificate <= cfg.stop_certificate) {
      trace.stop_reason = "certificate_threshold";
      break;
    }
  }
  trace.x_bar = A > 0.0 ? Vector(x_weighted / A) : last_point;
  trace.v_last = v;
  trace.summary["A"] = A;
  trace.summary["B"] = B;
  return trace;
}

double baseline_lipschitz(const ProblemInstance& inst, const MethodConfig& cfg) {
  if (cfg.lipschitz > 0.0) return cfg.lipschitz;
  const auto l = inst.constants().derivative_bound[1];
  if (!l || !(*l > 0.0)) throw ConfigurationError("baseline: instance '" + inst.name + "' records no M-hat_1");
  return *l;
}

}  // namespace

RunTrace run_primal(const ProblemInstance& inst, const MethodConfig& config) {
  return run_reduced_gradient(inst, config, Scheme::primal);
}

RunTrace run_dual(const ProblemInstance& inst, const MethodConfig& config) {
  return run_reduced_gradient(inst, config, Scheme::dual);
}

RunTrace run_projecting(const ProblemInstance& inst, const MethodConfig& config) {
  return run_reduced_gradient(inst, config, Scheme::projecting);
}

RunTrace run_uniform_monotone(const ProblemInstance& inst, const MethodConfig& config) {
  return run_reduced_gradient(inst, config, Scheme::uniform_monotone);
}

RunTrace run_switching(const ProblemInstance& inst, const MethodConfig& config) {
  if (!is_minimization_step(config.step.kind)) throw ConfigurationError("switching scheme needs a minimization step");
  if (!inst.op->has_potential()) throw ConfigurationError("switching scheme needs a potential");
  const int stage = config.stage_length > 0 ? config.stage_length : std::max(1, config.iterations / 2);
  MethodConfig first = config;
  first.iterations = stage;
  RunTrace trace = run_reduced_gradient(inst, first, Scheme::primal);
  trace.scheme = Scheme::switching;
  for (auto& r : trace.records) r.stage = 1;
  const Clock::time_point start = Clock::now();
  const double offset = trace.records.back().wall_time;

  const StepConfig& step = trace.step;
  const int p = step_order(step.kind);
  const double q = step_quality_exponent(step.kind);
  const Metric& metric = inst.metric;
  Vector y = trace.x_bar;
  double fy = inst.objective(y);
  double g_star = kInfinity;
  int descent_violations = 0;
  trace.summary["F_y0"] = fy;
  const int t0 = trace.records.back().t;
  for (int i = 0; i < stage; ++i) {
    StepRecord rec;
    try {
      rec = min_tensor_step(y, inst, step);
    } catch (const Error& e) {
      trace.stop_reason = std::string("stage2_failure: ") + e.what();
      break;
    }
    IterationRecord r;
    r.t = t0 + i + 1;
    r.stage = 2;
    r.a = rec.a;
    r.b = rec.b;
    r.A = trace.records.back().A;
    r.B = trace.records.back().B;
    r.gnorm = rec.gnorm;
    g_star = std::min(g_star, rec.gnorm);
    r.gnorm_best = g_star;
    r.inner_residual = rec.inner_residual;
    const double f_next = inst.objective(rec.point);
    r.objective = f_next;
    r.quality_lhs = rec.reduced_gradient.dot(y - rec.point);
    if (std::isfinite(trace.gamma)) r.quality_rhs = trace.gamma * std::pow(rec.gnorm, q);
    // Descent: F(y_i) - F(y_{i+1}) >= <F'(y_{i+1}), y_i - y_{i+1}> >= gamma G^{(p+1)/p}.
    r.aux = fy - f_next;
    const double scale = 1e-12 * (1.0 + std::abs(fy));
    if (r.aux < r.quality_lhs - scale - rec.inner_residual * rec.r) ++descent_violations;
    if (std::isfinite(r.quality_rhs) && r.quality_lhs < r.quality_rhs - (rec.inner_residual + 1e-6)) {
      ++trace.quality_violations;
      trace.worst_quality_excess = std::max(trace.worst_quality_excess, r.quality_rhs - r.quality_lhs);
    }
    if (inst.x_star) r.dist_x = metric.norm(rec.point - *inst.x_star);
    store(r, config, y, rec.point);
    r.wall_time = offset + seconds_since(start);
    trace.records.push_back(r);
    y = rec.point;
    fy = f_next;
    if (rec.stationary) break;
  }
  const double N = 2.0 * stage;
  trace.summary["N"] = N;
  trace.summary["G_star"] = g_star;
  trace.summary["descent_violations"] = descent_violations;
  if (inst.x_star && std::isfinite(trace.gamma)) {
    const double R = metric.norm(inst.x0 - *inst.x_star);
    trace.summary["G_bound"] = bound_switching(p, trace.gamma, R, N);
    if (const auto l = inst.constants().lipschitz[p]) trace.summary["G_bound_simple"] = bound_switching_simple(p, *l, R, N);
  }
  trace.v_last = y;
  return trace;
}

RunTrace run_baseline_gradient(const ProblemInstance& inst, const MethodConfig& config) {
  check_common(inst, config);
  const Clock::time_point start = Clock::now();
  const double L = baseline_lipschitz(inst, config);
  const Metric& metric = inst.metric;
  const double D = std::sqrt(metric.max_eigenvalue()) * inst.psi.domain().diameter();
  if (!std::isfinite(D)) throw ConfigurationError("baseline_gradient: needs a bounded domain (D)");

  RunTrace trace;
  trace.instance = inst.name;
  trace.scheme = Scheme::baseline_gradient;
  trace.summary["L"] = L;
  trace.summary["D"] = D;
  trace.stop_reason = "budget";
  const bool has_star = inst.x_star.has_value();

  std::vector<Vector> xs{inst.x0};
  std::vector<double> hs;
  IterationRecord first;
  store(first, config, inst.x0, inst.x0);
  if (has_star) first.dist_x = first.dist_v = metric.norm(inst.x0 - *inst.x_star);
  first.gnorm = first.gnorm_best = metric.dual_norm(inst.op->value(inst.x0));
  trace.records.push_back(first);
  double best_g = first.gnorm;
  Vector x = inst.x0;
  for (int k = 0; k < config.iterations; ++k) {
    const double h = 1.0 / (L * std::sqrt(k + 1.0));
    x = prox_step(x, h, inst.op->value(x), inst.psi, metric, PsiTreatment::domain_only);
    xs.push_back(x);
    hs.push_back(h);
    IterationRecord r;
    r.t = k + 1;
    r.a = h;
    r.A = trace.records.back().A + h;
    r.gnorm = metric.dual_norm(inst.op->value(x));
    best_g = std::min(best_g, r.gnorm);
    r.gnorm_best = best_g;
    if (has_star) r.dist_x = r.dist_v = metric.norm(x - *inst.x_star);
    if (log_due(config, r.t, config.iterations) && config.compute_merit) note_merit(r, x, inst);
    store(r, config, x, x);
    r.wall_time = seconds_since(start);
    trace.records.push_back(r);
  }
  std::vector<int> ms = config.windows;
  if (ms.empty()) ms = {50, 100, 200};
  for (int m : ms) {
    if (m < 2 || 2 * m > config.iterations) continue;
    WindowRecord w;
    w.m = m;
    double s1 = 0.0, s2 = 0.0;
    Vector avg = Vector::Zero(inst.dim());
    for (int i = m; i <= 2 * m - 1; ++i) {
      s1 += hs[i];
      s2 += hs[i] * hs[i];
      avg += hs[i] * xs[i + 1];
    }
    avg /= s1;
    w.point = avg;
    try {
      const MeritValue mv = merit(avg, inst);
      w.merit = mv.value;
      w.merit_exact = mv.exact;
    } catch (const Unsupported&) {
      w.merit = kNotAvailable;
    }
    w.lemma_bound = bound_window(L, s1, s2, D);
    w.rate_bound = bound_window_rate(L, D, m);
    trace.windows.push_back(w);
  }
  trace.x_bar = x;
  trace.v_last = x;
  return trace;
}

RunTrace run_baseline_extragradient(const ProblemInstance& inst, const MethodConfig& config) {
  check_common(inst, config);
  const Clock::time_point start = Clock::now();
  const double L = baseline_lipschitz(inst, config);
  const double h = config.extragradient_h > 0.0 ? config.extragradient_h : 1.0 / (std::sqrt(2.0) * L);
  const Metric& metric = inst.metric;

  RunTrace trace;
  trace.instance = inst.name;
  trace.scheme = Scheme::baseline_extragradient;
  trace.summary["L"] = L;
  trace.summary["h"] = h;
  trace.stop_reason = "budget";
  const bool has_star = inst.x_star.has_value();

  IterationRecord first;
  store(first, config, inst.x0, inst.x0);
  if (has_star) first.dist_x = first.dist_v = metric.norm(inst.x0 - *inst.x_star);
  trace.records.push_back(first);
  Vector x = inst.x0;
  Vector ysum = Vector::Zero(inst.dim());
  double best_g = kInfinity;
  for (int k = 0; k < config.iterations; ++k) {
    const Vector y = prox_step(x, h, inst.op->value(x), inst.psi, metric, PsiTreatment::domain_only);
    const Vector vy = inst.op->value(y);
    x = prox_step(x, h, vy, inst.psi, metric, PsiTreatment::domain_only);
    ysum += y;
    IterationRecord r;
    r.t = k + 1;
    r.a = h;
    r.A = h * (k + 1);
    r.gnorm = metric.dual_norm(vy);
    best_g = std::min(best_g, r.gnorm);
    r.gnorm_best = best_g;
    if (has_star) {
      r.dist_x = metric.norm(x - *inst.x_star);
      r.dist_v = metric.norm(y - *inst.x_star);
    }
    if (log_due(config, r.t, config.iterations)) note_merit(r, ysum / (k + 1.0), inst);
    store(r, config, y, x);
    r.wall_time = seconds_since(start);
    trace.records.push_back(r);
  }
  trace.x_bar = ysum / config.iterations;
  trace.v_last = x;
  return trace;
}

RunTrace run_method(const ProblemInstance& inst, const MethodConfig& config) {
  switch (config.scheme) {
    case Scheme::primal: return run_primal(inst, config);
    case Scheme::dual: return run_dual(inst, config);
    case Scheme::projecting: return run_projecting(inst, config);
    case Scheme::uniform_monotone: return run_uniform_monotone(inst, config);
    case Scheme::switching: return run_switching(inst, config);
    case Scheme::baseline_gradient: return run_baseline_gradient(inst, config);
    case Scheme::baseline_extragradient: return run_baseline_extragradient(inst, config);
  }
  throw ConfigurationError("run_method: unknown scheme");
}

}  // namespace rgvi
