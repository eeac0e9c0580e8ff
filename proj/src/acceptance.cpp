#include "rgvi/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <sstream>

#include "rgvi/bounds.hpp"
#include "rgvi/harness.hpp"
#include "rgvi/sampling.hpp"

namespace rgvi {

const char* to_string(CriterionStatus status) {
  switch (status) {
    case CriterionStatus::passed: return "pass";
    case CriterionStatus::failed: return "fail";
    case CriterionStatus::skipped: return "skipped";
  }
  return "unknown";
}

const std::vector<std::string>& criterion_titles() {
  static const std::vector<std::string> titles{
      "primal online inequality on the zoo",
      "dual and projecting online inequalities on the zoo",
      "distance control and hot start",
      "step-quality lower bounds",
      "VI certificate rate on random games",
      "minimization rates and switching scheme",
      "uniformly monotone linear rate",
      "certificate dominance chains",
      "baseline gradient and extragradient behavior",
      "oracle equivalences",
      "chained cubic exact values",
  };
  return titles;
}

bool AcceptanceReport::passed() const {
  return std::none_of(criteria.begin(), criteria.end(),
                      [](const CriterionResult& c) { return c.status == CriterionStatus::failed; });
}

std::string AcceptanceReport::to_json() const {
  using nlohmann::json;
  json out;
  out["passed"] = passed();
  out["gamma_scale"] = gamma_scale;
  out["criteria"] = json::array();
  for (const auto& c : criteria) {
    json jc;
    jc["id"] = c.id;
    jc["title"] = c.title;
    jc["status"] = to_string(c.status);
    jc["runtime_s"] = c.runtime;
    jc["measurements"] = json::array();
    for (const auto& m : c.measurements) {
      json jm;
      jm["name"] = m.name;
      jm["value"] = std::isfinite(m.value) ? json(m.value) : json(std::isnan(m.value) ? "nan" : m.value > 0 ? "inf" : "-inf");
      jm["relation"] = m.relation;
      jm["threshold"] = m.threshold;
      jm["passed"] = m.passed;
      jc["measurements"].push_back(jm);
    }
    jc["notes"] = c.notes;
    out["criteria"].push_back(jc);
  }
  return out.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  CriterionResult* result;

  void le(const std::string& name, double value, double threshold) {
    result->measurements.push_back({name, value, "<=", threshold, value <= threshold});
  }
  void ge(const std::string& name, double value, double threshold) {
    result->measurements.push_back({name, value, ">=", threshold, value >= threshold});
  }
  void note(const std::string& text) { result->notes.push_back(text); }
};

std::string num(double x) {
  std::ostringstream o;
  o << x;
  return o.str();
}

struct ZooCase {
  std::string label;
  ProblemInstance inst;
  StepKind kind;
};

std::vector<ZooCase> zoo_cases() {
  std::vector<ZooCase> cases;
  cases.push_back({"matching_pennies", make_matching_pennies(), StepKind::vi_order0});
  cases.push_back({"bilinear_game_10x10", make_random_bilinear_game(10, 10, 1), StepKind::vi_order0});
  const ProblemInstance curved = make_random_curved_game(10, 10, 0.5, 1);
  cases.push_back({"curved_game_p0", curved, StepKind::vi_order0});
  cases.push_back({"curved_game_p1", curved, StepKind::vi_order1});
  cases.push_back({"strongly_monotone_whole", make_strongly_monotone_affine(20, 0.1, 1.0, 1), StepKind::vi_order0});
  cases.push_back(
      {"strongly_monotone_box", make_strongly_monotone_affine(20, 0.1, 1.0, 2, SetKind::box), StepKind::vi_order0});
  cases.push_back({"rotation_ball", make_rotation_ball(1.0, 1.0), StepKind::vi_order0});
  cases.push_back({"chained_cubic_5", make_chained_cubic(5), StepKind::min_order2});
  cases.push_back({"quadratic_zero", make_composite_quadratic(10, CompositeKind::zero, 1), StepKind::min_order1});
  cases.push_back({"quadratic_l1", make_composite_quadratic(10, CompositeKind::l1, 2), StepKind::min_order1});
  for (SetKind k : {SetKind::box, SetKind::ball, SetKind::simplex}) {
    ProblemInstance q = make_composite_quadratic(10, CompositeKind::indicator, 3, k);
    cases.push_back({"quadratic_" + std::string(to_string(k)), std::move(q), StepKind::min_order1});
  }
  return cases;
}

// f = 0.5 <Qx, x> - <c, x> on R^n, spectrum log-spaced in [lo, 1].
ProblemInstance graded_quadratic(Index n, double lo, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) g.col(j) = random_normal(n, rng);
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix u = qr.householderQ();
  Vector eig(n);
  for (Index i = 0; i < n; ++i) eig[i] = std::pow(lo, static_cast<double>(i) / static_cast<double>(n - 1));
  const Vector c = random_normal(n, rng);
  ProblemInstance inst = make_quadratic(u * eig.asDiagonal() * u.transpose(), c, CompositeTerm::zero(n));
  inst.name = "graded_quadratic";
  return inst;
}

ProblemInstance with_start(const ProblemInstance& inst, const Vector& x0) {
  ProblemInstance out = inst;
  out.x0 = x0;
  return out;
}

// Primal, dual and projecting runs over the zoo, shared by criteria 1-4.
class ZooRuns {
 public:
  const std::vector<ZooCase>& cases() {
    ensure();
    return cases_;
  }
  // traces()[s][i] for scheme s in {primal, dual, projecting}; projecting is
  // empty (no records) where psi is not an indicator.
  const std::vector<std::vector<RunTrace>>& traces() {
    ensure();
    return traces_;
  }
  const std::vector<std::vector<double>>& seconds() {
    ensure();
    return seconds_;
  }
  static constexpr Scheme kSchemes[3] = {Scheme::primal, Scheme::dual, Scheme::projecting};

 private:
  void ensure() {
    std::call_once(once_, [this] {
      cases_ = zoo_cases();
      traces_.assign(3, std::vector<RunTrace>(cases_.size()));
      seconds_.assign(3, std::vector<double>(cases_.size(), 0.0));
      parallel_for(static_cast<int>(3 * cases_.size()), [this](int k) {
        const std::size_t s = k / cases_.size(), i = k % cases_.size();
        const ZooCase& zc = cases_[i];
        if (kSchemes[s] == Scheme::projecting && !zc.inst.psi.is_indicator()) return;
        MethodConfig m;
        m.scheme = kSchemes[s];
        m.step.kind = zc.kind;
        m.iterations = 500;
        m.compute_certificate = false;
        m.store_points = false;
        const auto start = Clock::now();
        traces_[s][i] = run_method(zc.inst, m);
        seconds_[s][i] = std::chrono::duration<double>(Clock::now() - start).count();
      });
    });
  }

  std::once_flag once_;
  std::vector<ZooCase> cases_;
  std::vector<std::vector<RunTrace>> traces_;
  std::vector<std::vector<double>> seconds_;
};

struct Context {
  AcceptanceOptions options;
  ZooRuns zoo;
};

// max over t of (lhs - rhs - 1e-8 t); <= 0 means the inequality held within budget.
double online_excess(const RunTrace& trace) {
  double worst = -kInfinity;
  for (const auto& r : trace.records) {
    if (!std::isfinite(r.theorem_lhs) || !std::isfinite(r.theorem_rhs)) continue;
    worst = std::max(worst, r.theorem_lhs - r.theorem_rhs - 1e-8 * r.t);
  }
  return worst;
}

void online_inequality(Criterion& c, Context& ctx, std::size_t scheme_index) {
  const auto& cases = ctx.zoo.cases();
  const auto& traces = ctx.zoo.traces()[scheme_index];
  const auto& secs = ctx.zoo.seconds()[scheme_index];
  const std::string scheme = to_string(ZooRuns::kSchemes[scheme_index]);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const RunTrace& tr = traces[i];
    if (tr.records.empty()) {
      c.note(scheme + "/" + cases[i].label + ": not applicable (psi is not an indicator)");
      continue;
    }
    const std::string tag = scheme + "/" + cases[i].label;
    c.le(tag + ": max_t (lhs - rhs - 1e-8 t)", online_excess(tr), 0.0);
    c.le(tag + ": wall time [s]", secs[i], 10.0);
    c.note(tag + ": " + std::to_string(tr.records.back().t) + " iterations, stop = " + tr.stop_reason);
  }
}

void criterion1(Criterion& c, Context& ctx) { online_inequality(c, ctx, 0); }

void criterion2(Criterion& c, Context& ctx) {
  online_inequality(c, ctx, 1);
  online_inequality(c, ctx, 2);
}

void criterion3(Criterion& c, Context& ctx) {
  const auto& cases = ctx.zoo.cases();
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (cases[i].inst.problem_class != ProblemClass::variational_inequality) continue;
      const RunTrace& tr = ctx.zoo.traces()[s][i];
      if (tr.records.empty()) continue;
      const double d0 = tr.records.front().dist_v;
      double worst = 0.0;
      for (const auto& r : tr.records)
        if (std::isfinite(r.dist_v)) worst = std::max(worst, r.dist_v / d0);
      c.le(std::string(to_string(ZooRuns::kSchemes[s])) + "/" + cases[i].label + ": max_t |v_t - x*| / |x0 - x*|",
           worst, 1.0 + 1e-6);
    }
  }

  // Hot start: halve x0 - x* and compare the value-rate bound at fixed t.
  struct HotCase {
    std::string label;
    ProblemInstance inst;
    StepKind kind;
  };
  const std::vector<HotCase> hot{{"graded_quadratic p=1", graded_quadratic(10, 0.01, 5), StepKind::min_order1},
                                 {"chained_cubic_5 p=2", make_chained_cubic(5), StepKind::min_order2}};
  const int t_fixed = 200;
  for (const auto& h : hot) {
    const int p = step_order(h.kind);
    const double L = required_constant(h.inst, h.kind);
    const Vector& xs = *h.inst.x_star;
    const ProblemInstance half = with_start(h.inst, xs + 0.5 * (h.inst.x0 - xs));
    MethodConfig m;
    m.step.kind = h.kind;
    m.iterations = t_fixed;
    m.compute_certificate = false;
    m.store_points = false;
    for (const ProblemInstance* inst : {&h.inst, &half}) {
      const RunTrace tr = run_primal(*inst, m);
      const double R = inst->metric.norm(inst->x0 - xs);
      const auto& last = tr.records.back();
      const double t = last.t;
      const std::string tag = h.label + (inst == &half ? " (halved start)" : "");
      if (last.t < t_fixed) c.note(tag + ": stopped at t = " + std::to_string(last.t) + " (" + tr.stop_reason + ")");
      const double rec_t = std::isfinite(last.objective_tilde) ? last.objective_tilde : tr.records[tr.records.size() - 2].objective_tilde;
      c.le(tag + ": F~_t - F* at t = " + num(t) + " minus bound", rec_t - *inst->f_star - bound_value_min_star(p, L, R, t),
           1e-12);
    }
    const double R = h.inst.metric.norm(h.inst.x0 - xs);
    const double ratio = bound_value_min_star(p, L, R, t_fixed) / bound_value_min_star(p, L, 0.5 * R, t_fixed);
    c.ge(h.label + ": bound(R) / bound(R/2)", ratio, std::pow(2.0, p + 1) * (1.0 - 1e-6));
  }
}

void criterion4(Criterion& c, Context& ctx) {
  const double scale = ctx.options.gamma_scale;
  if (scale != 1.0) c.note("step-quality constants multiplied by " + num(scale));
  long steps = 0;
  double worst = -kInfinity;
  std::string worst_where;
  auto account = [&](double lhs, double rhs, double residual, const std::string& where) {
    if (!std::isfinite(rhs)) return;
    ++steps;
    const double slack = lhs - scale * rhs + residual;
    const double excess = -slack;
    if (excess > worst) {
      worst = excess;
      worst_where = where;
    }
  };
  const auto& cases = ctx.zoo.cases();
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (cases[i].kind == StepKind::min_order1) continue;
      for (const auto& r : ctx.zoo.traces()[s][i].records)
        if (r.t > 0) account(r.quality_lhs, r.quality_rhs, r.inner_residual, cases[i].label);
    }
  }
  const long from_runs = steps;
  // Fresh steps from random prox-centers.
  Rng rng(2024);
  for (const auto& zc : cases) {
    if (zc.kind == StepKind::min_order1) continue;
    const StepConfig cfg = resolve_step_config(zc.inst, StepConfig{zc.kind});
    const double gamma = step_quality_constant(zc.inst, cfg);
    const double q = step_quality_exponent(zc.kind);
    const int samples = zc.kind == StepKind::vi_order0 ? 1200 : 300;
    for (int k = 0; k < samples; ++k) {
      const Vector v = sample_point(zc.inst.psi.domain(), rng, zc.inst.x0, 1.0);
      const StepRecord rec = essential_step(v, zc.inst, cfg);
      if (rec.stationary) continue;
      account(rec.reduced_gradient.dot(v - rec.point), gamma * std::pow(rec.gnorm, q), rec.inner_residual,
              zc.label + " (random v)");
    }
  }
  c.ge("steps checked", static_cast<double>(steps), 1e4);
  c.le("max over steps of gamma g^q - <V_psi(T), v - T> - inner residual", worst, 1e-6);
  c.note(std::to_string(from_runs) + " steps from zoo runs, " + std::to_string(steps - from_runs) +
         " from random prox-centers; worst on " + worst_where);
}

void criterion5(Criterion& c, Context&) {
  struct RateCase {
    std::string label;
    ProblemInstance inst;
    StepKind kind;
    double slope_max;
  };
  std::vector<RateCase> runs;
  for (std::uint64_t seed : {1, 2, 3})
    runs.push_back({"bilinear_game_10x10 seed " + std::to_string(seed) + " p=0", make_random_bilinear_game(10, 10, seed),
                    StepKind::vi_order0, -0.9});
  for (std::uint64_t seed : {1, 2, 3})
    runs.push_back({"curved_game_10x10 kappa=50 seed " + std::to_string(seed) + " p=1",
                    make_random_curved_game(10, 10, 50.0, seed), StepKind::vi_order1, -1.3});
  std::vector<RunTrace> traces(runs.size());
  const auto start = Clock::now();
  parallel_for(static_cast<int>(runs.size()), [&](int i) {
    MethodConfig m;
    m.step.kind = runs[i].kind;
    m.iterations = 2000;
    m.store_points = false;
    traces[i] = run_primal(runs[i].inst, m);
  });
  c.le("wall time of the six runs [s]", std::chrono::duration<double>(Clock::now() - start).count(), 60.0);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunTrace& tr = traces[i];
    const int p = step_order(runs[i].kind);
    const double mhat = required_constant(runs[i].inst, runs[i].kind);
    std::vector<double> ts, ys;
    double worst = -kInfinity;
    for (const auto& r : tr.records) {
      if (!std::isfinite(r.certificate)) continue;
      ts.push_back(r.t);
      ys.push_back(r.certificate);
      worst = std::max(worst, r.certificate / bound_certificate_vi_star(p, mhat, tr.R0, r.t));
    }
    c.le(runs[i].label + ": max_t certificate / bound", worst, 1.0);
    const double t_last = ts.empty() ? 0.0 : ts.back();
    const double t_hi = std::min(2000.0, t_last);
    if (t_last < 2000.0)
      c.note(runs[i].label + ": run ended at t = " + num(tr.records.back().t) + " (" + tr.stop_reason +
             "); slope window truncated to [20, " + num(t_hi) + "]");
    try {
      const RateFit fit = fit_rate(ts, ys, 20.0, t_hi);
      c.le(runs[i].label + ": certificate slope on [20, " + num(t_hi) + "]", fit.slope, runs[i].slope_max);
    } catch (const InvalidInput& e) {
      c.le(runs[i].label + ": certificate slope (not measurable)", kNotAvailable, runs[i].slope_max);
      c.note(runs[i].label + ": " + e.what());
    }
  }
}

void criterion6(Criterion& c, Context&) {
  struct MinCase {
    std::string label;
    ProblemInstance inst;
    StepKind kind;
    double slope_max;
  };
  std::vector<MinCase> cases;
  for (std::uint64_t seed : {1, 2, 3}) {
    const std::string s = " seed " + std::to_string(seed) + " p=1";
    cases.push_back({"quadratic_zero" + s, make_composite_quadratic(10, CompositeKind::zero, seed),
                     StepKind::min_order1, -0.9});
    cases.push_back({"quadratic_l1" + s, make_composite_quadratic(10, CompositeKind::l1, seed), StepKind::min_order1,
                     -0.9});
    for (SetKind k : {SetKind::box, SetKind::ball})
      cases.push_back({"quadratic_" + std::string(to_string(k)) + s,
                       make_composite_quadratic(10, CompositeKind::indicator, seed, k), StepKind::min_order1, -0.9});
  }
  cases.push_back({"chained_cubic_5 p=2", make_chained_cubic(5), StepKind::min_order2, -1.3});
  for (const auto& mc : cases) {
    const int p = step_order(mc.kind);
    const double L = required_constant(mc.inst, mc.kind);
    const double R = mc.inst.metric.norm(mc.inst.x0 - *mc.inst.x_star);
    MethodConfig m;
    m.step.kind = mc.kind;
    m.iterations = 500;
    m.compute_certificate = false;
    m.store_points = false;
    const RunTrace tr = run_primal(mc.inst, m);
    std::vector<double> ts, gaps;
    double worst_value = -kInfinity, worst_grad = -kInfinity;
    for (const auto& r : tr.records) {
      if (r.t == 0 || !std::isfinite(r.objective_tilde)) continue;
      const double gap = r.objective_tilde - *mc.inst.f_star;
      ts.push_back(r.t);
      gaps.push_back(gap);
      worst_value = std::max(worst_value, gap / bound_value_min_star(p, L, R, r.t));
      worst_grad = std::max(worst_grad, r.gnorm_best / bound_grad_min_star(p, L, R, r.t));
    }
    c.le(mc.label + ": max_t (F~_t - F*) / value bound", worst_value, 1.0);
    c.le(mc.label + ": max_t g*_t / gradient bound", worst_grad, 1.0);
    const double t_hi = std::min(500.0, ts.empty() ? 0.0 : ts.back());
    if (t_hi < 500.0) c.note(mc.label + ": run ended at t = " + num(t_hi) + " (" + tr.stop_reason + ")");
    try {
      const RateFit fit = fit_rate(ts, gaps, 10.0, t_hi);
      c.le(mc.label + ": slope of F~_t - F* on [10, " + num(t_hi) + "]", fit.slope, mc.slope_max);
    } catch (const InvalidInput& e) {
      c.le(mc.label + ": slope of F~_t - F* (not measurable)", kNotAvailable, mc.slope_max);
      c.note(mc.label + ": " + e.what());
    }
  }

  const std::vector<MinCase> switching{cases.front(), cases.back()};
  for (int N : {20, 40, 80}) {
    for (const auto& mc : switching) {
      MethodConfig m;
      m.scheme = Scheme::switching;
      m.step.kind = mc.kind;
      m.stage_length = N / 2;
      m.iterations = N;
      m.compute_certificate = false;
      m.store_points = false;
      const RunTrace tr = run_switching(mc.inst, m);
      const std::string tag = mc.label + " switching N=" + std::to_string(N);
      c.le(tag + ": G* / bound", tr.summary.at("G_star") / tr.summary.at("G_bound"), 1.0);
      c.le(tag + ": descent violations in stage b", tr.summary.at("descent_violations"), 0.0);
    }
  }
}

void criterion7(Criterion& c, Context&) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const ProblemInstance inst = make_strongly_monotone_affine(20, 0.1, 1.0, seed);
    MethodConfig m;
    m.scheme = Scheme::uniform_monotone;
    m.iterations = 200;
    m.compute_certificate = false;
    m.store_points = false;
    const RunTrace tr = run_uniform_monotone(inst, m);
    const std::string tag = "strongly_monotone_affine seed " + std::to_string(seed);
    const double alpha0 = 2.0 * gamma_vi(0, tr.step.M, 1.0) * 0.1;
    c.le(tag + ": |alpha - 2 gamma_0 sigma_2|", std::abs(tr.alpha - alpha0), 1e-15);
    double worst = 0.0;
    for (const auto& r : tr.records)
      if (r.t > 0 && std::isfinite(r.aux)) worst = std::max(worst, r.aux);
    c.le(tag + ": max_t |v_{t+1} - x*|^2 (1 + alpha) / |v_t - x*|^2", worst, 1.0 + 1e-8);
    const auto& last = tr.records.back();
    const double d0 = tr.records.front().dist_v;
    c.le(tag + ": final |v_t - x*| / ((1 + alpha)^{-t/2} |x0 - x*|)",
         last.dist_v / (std::pow(1.0 + tr.alpha, -0.5 * last.t) * d0), 1.0 + 1e-6);
    c.note(tag + ": alpha = " + num(tr.alpha) + ", t = " + std::to_string(last.t) + ", stop = " + tr.stop_reason);
  }
}

void criterion8(Criterion& c, Context&) {
  struct CertCase {
    std::string label;
    ProblemInstance inst;
    StepKind kind;
  };
  std::vector<CertCase> cases{
      {"matching_pennies", make_matching_pennies(), StepKind::vi_order0},
      {"bilinear_game_10x10", make_random_bilinear_game(10, 10, 1), StepKind::vi_order0},
      {"strongly_monotone_box", make_strongly_monotone_affine(20, 0.1, 1.0, 2, SetKind::box), StepKind::vi_order0},
      {"rotation_ball", make_rotation_ball(1.0, 1.0), StepKind::vi_order0},
      {"chained_cubic_5", make_chained_cubic(5), StepKind::min_order2},
      {"quadratic_zero", make_composite_quadratic(10, CompositeKind::zero, 1), StepKind::min_order1},
      {"quadratic_l1", make_composite_quadratic(10, CompositeKind::l1, 2), StepKind::min_order1},
      {"quadratic_box", make_composite_quadratic(10, CompositeKind::indicator, 3, SetKind::box), StepKind::min_order1},
      {"quadratic_simplex", make_composite_quadratic(10, CompositeKind::indicator, 3, SetKind::simplex),
       StepKind::min_order1},
  };
  struct Job {
    std::size_t index;
    Scheme scheme;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cases.size(); ++i)
    for (Scheme s : {Scheme::primal, Scheme::dual, Scheme::projecting})
      if (s != Scheme::projecting || cases[i].inst.psi.is_indicator()) jobs.push_back({i, s});
  std::vector<RunTrace> traces(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), [&](int j) {
    const CertCase& cc = cases[jobs[j].index];
    MethodConfig m;
    m.scheme = jobs[j].scheme;
    m.step.kind = cc.kind;
    m.iterations = 500;
    m.log_every = 1;
    m.compute_merit = cc.inst.problem_class == ProblemClass::variational_inequality;
    m.store_points = false;
    traces[j] = run_method(cc.inst, m);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const CertCase& cc = cases[jobs[j].index];
    const RunTrace& tr = traces[j];
    const std::string tag = std::string(to_string(jobs[j].scheme)) + "/" + cc.label;
    int checked = 0, inexact = 0;
    double worst_chain = -kInfinity, min_merit = kInfinity, worst_alt = -kInfinity;
    for (const auto& r : tr.records) {
      if (!std::isfinite(r.certificate)) continue;
      if (cc.inst.problem_class == ProblemClass::variational_inequality) {
        if (!std::isfinite(r.merit)) continue;
        if (!r.merit_exact) {
          ++inexact;
          continue;
        }
        worst_chain = std::max(worst_chain, r.merit - r.certificate - 1e-8 * (1.0 + std::abs(r.merit)));
        min_merit = std::min(min_merit, r.merit);
      } else {
        const double gap = r.objective_tilde - *cc.inst.f_star;
        const double tol = 1e-9 * (1.0 + std::abs(*cc.inst.f_star));
        worst_chain = std::max(worst_chain, gap - r.certificate - tol);
        worst_alt = std::max(worst_alt, gap - r.certificate_alt - tol);
      }
      ++checked;
    }
    c.ge(tag + ": logged iterates checked", checked, 1.0);
    if (cc.inst.problem_class == ProblemClass::variational_inequality) {
      c.le(tag + ": max (merit - Delta^V)", worst_chain, 0.0);
      c.ge(tag + ": min merit", min_merit, -1e-8);
      if (inexact > 0) c.note(tag + ": " + std::to_string(inexact) + " merit values were lower bounds, skipped");
    } else {
      const bool dual = jobs[j].scheme == Scheme::dual;
      c.le(tag + (dual ? ": max (F~ - F* - Delta^psi)" : ": max (F~ - F* - Delta^F)"), worst_chain, 0.0);
      c.le(tag + (dual ? ": max (F~ - F* - Delta^F)" : ": max (F~ - F* - Delta^psi)"), worst_alt, 0.0);
    }
  }
}

void criterion9(Criterion& c, Context&) {
  {
    const ProblemInstance inst = make_rotation_ball(1.0, 1.0);
    MethodConfig m;
    m.scheme = Scheme::baseline_gradient;
    m.iterations = 500;
    m.store_points = false;
    const RunTrace tr = run_baseline_gradient(inst, m);
    double worst_drop = 0.0;
    for (std::size_t k = 1; k < tr.records.size(); ++k)
      worst_drop = std::max(worst_drop, tr.records[k - 1].dist_x - tr.records[k].dist_x);
    c.le("rotation_ball gradient: max_k (|x_k - x*| - |x_{k+1} - x*|)", worst_drop, 1e-12);
    c.ge("rotation_ball gradient: |x_K - x*| - |x_0 - x*|", tr.records.back().dist_x - tr.records.front().dist_x, 0.0);
  }
  for (const ProblemInstance& inst : {make_rotation_ball(1.0, 1.0), make_matching_pennies()}) {
    MethodConfig m;
    m.scheme = Scheme::baseline_gradient;
    m.iterations = 400;
    m.windows = {50, 100, 200};
    m.store_points = false;
    const RunTrace tr = run_baseline_gradient(inst, m);
    c.ge(inst.name + ": windows evaluated", static_cast<double>(tr.windows.size()), 3.0);
    for (const auto& w : tr.windows) {
      const std::string tag = inst.name + " window m=" + std::to_string(w.m);
      c.le(tag + ": merit / lemma bound", w.merit / w.lemma_bound, 1.0);
      c.le(tag + ": merit / rate bound", w.merit / w.rate_bound, 1.0);
      if (!w.merit_exact) c.note(tag + ": merit is a lower bound");
    }
  }
  {
    const ProblemInstance inst = make_matching_pennies();
    MethodConfig m;
    m.scheme = Scheme::baseline_extragradient;
    m.iterations = 2000;
    m.store_points = false;
    const RunTrace tr = run_baseline_extragradient(inst, m);
    std::vector<double> ts, ys;
    for (const auto& r : tr.records)
      if (r.t > 0 && std::isfinite(r.merit)) {
        ts.push_back(r.t);
        ys.push_back(r.merit);
      }
    const RateFit fit = fit_rate(ts, ys, 20.0, 2000.0);
    c.ge("matching_pennies extragradient: averaged-merit slope on [20, 2000]", fit.slope, -1.15);
    c.le("matching_pennies extragradient: averaged-merit slope on [20, 2000]", fit.slope, -0.85);
  }
}

// Golden-section search for the minimum of a unimodal function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < 200 && b - a > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++k) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

void criterion10(Criterion& c, Context&) {
  Rng rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  {
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double sigma = 1.0 + 2.0 * unit(rng);
      const double gamma = std::pow(10.0, -2.0 + 4.0 * unit(rng));
      const double delta = std::pow(10.0, -3.0 + 6.0 * unit(rng));
      const auto phi = [&](double lg) {
        const double g = std::exp(lg);
        return 0.5 * gamma * std::pow(g, 2.0 / sigma) + std::pow(g, (1.0 - sigma) / sigma) * delta;
      };
      // Coarse grid in log g, then golden section around the best node.
      const double lo = -60.0, hi = 60.0;
      const int n = 4000;
      int best = 0;
      double best_val = kInfinity;
      for (int i = 0; i <= n; ++i) {
        const double val = phi(lo + (hi - lo) * i / n);
        if (val < best_val) {
          best_val = val;
          best = i;
        }
      }
      const double h = (hi - lo) / n;
      const double grid = std::min(best_val, golden_min(phi, lo + h * (best - 1), lo + h * (best + 1)));
      const double closed = tech_lemma_value(sigma, gamma, delta);
      worst = std::max(worst, std::abs(closed - grid) / std::abs(grid));
    }
    c.le("tech lemma: max relative error vs grid search (1000 inputs)", worst, 1e-6);
  }
  {
    const std::vector<ProblemInstance> insts{make_matching_pennies(), make_random_bilinear_game(10, 10, 1),
                                             make_strongly_monotone_affine(20, 0.1, 1.0, 2, SetKind::box),
                                             make_rotation_ball(1.0, 1.0), make_random_curved_game(10, 10, 0.5, 1)};
    double worst_point = 0.0, worst_grad = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const ProblemInstance& inst = insts[k % insts.size()];
      const double M = default_vi_M(0, required_constant(inst, StepKind::vi_order0));
      const Vector v = sample_point(inst.psi.domain(), rng, inst.x0, 1.0);
      const StepRecord rec = vi_step_order0(v, inst, M);
      const Vector vv = inst.op->value(v);
      const Vector t = inst.psi.domain().project(v - vv / M);
      const Vector g = inst.op->value(t) - vv - M * (t - v);
      worst_point = std::max(worst_point, (rec.point - t).norm() / (1.0 + t.norm()));
      worst_grad = std::max(worst_grad, (rec.reduced_gradient - g).norm() / (1.0 + vv.norm()));
    }
    c.le("p=0 VI step vs projection formula: point error", worst_point, 1e-10);
    c.le("p=0 VI step vs projection formula: V_psi error", worst_grad, 1e-10);
  }
  {
    struct PairCase {
      ProblemInstance inst;
      StepKind kind;
    };
    const ProblemInstance curved = make_random_curved_game(10, 10, 0.5, 1);
    const std::vector<PairCase> pc{{make_random_bilinear_game(10, 10, 1), StepKind::vi_order0},
                                   {make_strongly_monotone_affine(20, 0.1, 1.0, 2, SetKind::box), StepKind::vi_order0},
                                   {make_rotation_ball(1.0, 1.0), StepKind::vi_order0},
                                   {curved, StepKind::vi_order0},
                                   {curved, StepKind::vi_order1},
                                   {make_composite_quadratic(10, CompositeKind::l1, 2), StepKind::min_order1},
                                   {make_composite_quadratic(10, CompositeKind::indicator, 3, SetKind::simplex),
                                    StepKind::min_order1}};
    const int pairs = 10000;
    double worst = -kInfinity;
    for (int k = 0; k < pairs; ++k) {
      const PairCase& p = pc[k % pc.size()];
      const StepConfig cfg = resolve_step_config(p.inst, StepConfig{p.kind});
      const Vector v1 = sample_point(p.inst.psi.domain(), rng, p.inst.x0, 1.0);
      const Vector v2 = sample_point(p.inst.psi.domain(), rng, p.inst.x0, 1.0);
      const StepRecord s1 = essential_step(v1, p.inst, cfg);
      const StepRecord s2 = essential_step(v2, p.inst, cfg);
      const Vector dt = s1.point - s2.point;
      const double lhs = (s1.reduced_gradient - s2.reduced_gradient).dot(dt);
      const double rhs = (s1.operator_value - s2.operator_value).dot(dt);
      worst = std::max(worst, rhs - lhs);
    }
    c.ge("V_psi lemma: step pairs", pairs, 1e4);
    c.le("V_psi lemma: max <V(T1) - V(T2), dT> - <V_psi(T1) - V_psi(T2), dT>", worst, 1e-8);
  }
}

void criterion11(Criterion& c, Context&) {
  double worst_ones = 0.0, worst_bar = 0.0, worst_norm = 0.0;
  for (int n = 2; n <= 10; ++n) {
    const ProblemInstance inst = make_chained_cubic(n);
    Vector xbar(n);
    for (int i = 0; i < n; ++i) xbar[i] = std::ldexp(1.0, i + 1) - 1.0;
    worst_ones = std::max(worst_ones, std::abs(inst.objective(Vector::Ones(n)) - n));
    worst_bar = std::max(worst_bar, std::abs(inst.objective(xbar) - n));
    const double closed = 8.0 * (std::ldexp(1.0, n) - 1.0) * (std::ldexp(1.0, n - 1) - 1.0) / 3.0 + n;
    worst_norm = std::max(worst_norm, std::abs(xbar.squaredNorm() - closed));
  }
  c.le("max_n |f(1, ..., 1) - n|", worst_ones, 0.0);
  c.le("max_n |f(xbar) - n|", worst_bar, 0.0);
  c.le("max_n | |xbar|^2 - closed form |", worst_norm, 0.0);
}

}  // namespace

AcceptanceReport acceptance_suite(const AcceptanceOptions& options) {
  using Body = void (*)(Criterion&, Context&);
  static const Body bodies[kCriterionCount] = {criterion1, criterion2, criterion3, criterion4,
                                               criterion5, criterion6, criterion7, criterion8,
                                               criterion9, criterion10, criterion11};
  Context ctx;
  ctx.options = options;
  AcceptanceReport report;
  report.gamma_scale = options.gamma_scale;
  for (int id = 1; id <= kCriterionCount; ++id) {
    CriterionResult res;
    res.id = id;
    res.title = criterion_titles()[id - 1];
    const bool selected =
        options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
    if (selected) {
      const auto start = Clock::now();
      Criterion c{&res};
      try {
        bodies[id - 1](c, ctx);
      } catch (const std::exception& e) {
        c.note(std::string("aborted: ") + e.what());
        res.measurements.push_back({"completed without error", 0.0, ">=", 1.0, false});
      }
      res.runtime = std::chrono::duration<double>(Clock::now() - start).count();
      const bool ok = !res.measurements.empty() &&
                      std::all_of(res.measurements.begin(), res.measurements.end(),
                                  [](const Measurement& m) { return m.passed; });
      res.status = ok ? CriterionStatus::passed : CriterionStatus::failed;
    }
    report.criteria.push_back(std::move(res));
  }
  return report;
}

}  // namespace rgvi
