#include "rgvi/certify.hpp"

#include <cmath>

#include "rgvi/errors.hpp"
#include "rgvi/sampling.hpp"

namespace rgvi {

const char* to_string(MeritMode mode) {
  switch (mode) {
    case MeritMode::automatic: return "automatic";
    case MeritMode::closed_form: return "closed_form";
    case MeritMode::inner_solve: return "inner_solve";
    case MeritMode::sample_lower_bound: return "sample_lower_bound";
  }
  return "unknown";
}

const char* to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::functional: return "functional";
    case CertificateKind::dual_composite: return "dual_composite";
    case CertificateKind::variational: return "variational";
  }
  return "unknown";
}

namespace {

// sup over dom psi of <w, x> - weight psi(x) without a ball constraint.
SupportQuery unrestricted_support(const Vector& w, const CompositeTerm& psi, double weight) {
  SupportQuery q;
  if (weight == 0.0 || psi.is_indicator()) {
    const SupportResult s = psi.domain().support(w);
    q.value = s.value;
    q.argmax = s.argmax;
    return q;
  }
  const double thr = weight * psi.l1_weight();
  if (w.lpNorm<Eigen::Infinity>() > thr)
    throw Unsupported("composite_support: unbounded supremum for the l1 term");
  q.value = 0.0;
  q.argmax = Vector::Zero(w.size());
  return q;
}

}  // namespace

SupportQuery composite_support(const Vector& w, const CompositeTerm& psi, const Metric& metric, double weight,
                               const Vector& center, double radius) {
  if (w.size() != psi.dim() || center.size() != psi.dim()) throw InvalidInput("composite_support: dimension mismatch");
  if (!all_finite(w)) throw InvalidInput("composite_support: non-finite direction");
  if (!(weight >= 0.0) || !(radius > 0.0)) throw InvalidInput("composite_support: need weight >= 0, radius > 0");
  const bool ball = std::isfinite(radius);
  const double scale = std::sqrt(metric.max_eigenvalue());
  if (!ball || (psi.domain_bounded() && radius >= scale * psi.domain().max_distance(center)))
    return unrestricted_support(w, psi, weight);

  // The unrestricted maximizer may already lie in the ball.
  try {
    SupportQuery q = unrestricted_support(w, psi, weight);
    if (metric.norm(q.argmax - center) <= radius) return q;
  } catch (const Unsupported&) {
  }

  const CompositeTerm* term = &psi;
  CompositeTerm domain_only;
  if (weight == 0.0 && !psi.is_indicator()) {
    domain_only = CompositeTerm::indicator(psi.domain());
    term = &domain_only;
  }
  const double eff_weight = weight == 0.0 ? 0.0 : weight;
  const Vector binv_w = metric.apply_inverse(w);
  auto point = [&](double lam) {
    return metric_prox(center + binv_w / lam, *term, metric, eff_weight / lam);
  };
  auto objective = [&](const Vector& x) { return w.dot(x) - (eff_weight == 0.0 ? 0.0 : eff_weight * term->value(x)); };

  const double wn = metric.dual_norm(w);
  if (wn == 0.0 && term->is_indicator()) {
    SupportQuery q;
    q.value = 0.0;
    q.argmax = center;
    return q;
  }
  double hi = std::max(wn, 1e-300) / radius;
  Vector x_hi = point(hi);
  for (int k = 0; k < 200 && metric.norm(x_hi - center) > radius; ++k) {
    hi *= 2.0;
    x_hi = point(hi);
  }
  double lo = 0.0;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    const Vector x = point(mid);
    if (metric.norm(x - center) > radius) {
      lo = mid;
    } else {
      hi = mid;
      x_hi = x;
    }
  }
  SupportQuery q;
  q.argmax = x_hi;
  const double d2 = std::pow(metric.norm(x_hi - center), 2);
  const double primal = objective(x_hi);
  q.value = primal - 0.5 * hi * (d2 - radius * radius);
  q.gap = q.value - primal;
  return q;
}

// ---- merit ---------------------------------------------------------------------

namespace {

bool is_skew(const Matrix& a) { return (a + a.transpose()).norm() <= 1e-12 * std::max(1.0, a.norm()); }

MeritValue merit_closed_form(const Vector& xbar, const ProblemInstance& inst, const AffineMap& map) {
  const Vector w = -map.a * xbar - map.b;
  const SupportQuery q = composite_support(w, inst.psi, inst.metric, 1.0, inst.x0, kInfinity);
  MeritValue m;
  m.value = inst.psi.value(xbar) + map.b.dot(xbar) + q.value;
  m.mode = MeritMode::closed_form;
  m.exact = true;
  return m;
}

// max_x <w, x> - <Sx, x> - psi(x) for PSD S by restarted FISTA on the negation.
MeritValue merit_inner_solve(const Vector& xbar, const ProblemInstance& inst, const AffineMap& map) {
  const Matrix s = 0.5 * (map.a + map.a.transpose());
  const Vector w = map.a.transpose() * xbar - map.b;
  const double constant = inst.psi.value(xbar) + map.b.dot(xbar);
  const CompositeTerm& psi = inst.psi;
  auto phi = [&](const Vector& x) { return w.dot(x) - x.dot(s * x) - psi.value(x); };
  MeritValue m;
  m.mode = MeritMode::inner_solve;

  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (psi.is_indicator() && psi.domain().is_whole_space()) {
    if (lmin <= 1e-12 * std::max(1.0, lmax)) throw Unsupported("merit: unbounded domain with singular symmetric part");
    const Vector x = 0.5 * s.ldlt().solve(w);
    m.value = constant + phi(x);
    m.exact = true;
    return m;
  }
  if (!psi.domain_bounded() && lmin <= 1e-12 * std::max(1.0, lmax))
    throw Unsupported("merit: unbounded domain with singular symmetric part");
  if (lmax <= 0.0) {
    const SupportQuery q = composite_support(w, psi, inst.metric, 1.0, inst.x0, kInfinity);
    m.value = constant + q.value;
    m.exact = true;
    return m;
  }
  const double step = 1.0 / (2.0 * lmax);
  auto grad = [&](const Vector& x) { return Vector(2.0 * (s * x) - w); };
  Vector x = psi.euclidean_prox(xbar, step);
  Vector y = x;
  double t = 1.0;
  const double tol = 1e-13 * (1.0 + w.norm());
  bool converged = false;
  for (int it = 0; it < 200000; ++it) {
    const Vector next = psi.euclidean_prox(y - step * grad(y), step);
    const Vector check = psi.euclidean_prox(next - step * grad(next), step);
    if ((check - next).norm() / step <= tol) {
      x = check;
      converged = true;
      break;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if ((next - x).dot(y - next) > 0.0) {
      y = next;
      t = 1.0;
    } else {
      y = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x = next;
  }
  m.value = constant + phi(x);
  m.exact = converged;
  return m;
}

MeritValue merit_sampled(const Vector& xbar, const ProblemInstance& inst, std::uint64_t seed) {
  const CompositeTerm& psi = inst.psi;
  if (!psi.domain_bounded() && !inst.op->has_potential())
    throw Unsupported("merit: unbounded domain without a potential");
  const double base = psi.value(xbar);
  auto phi = [&](const Vector& x) { return inst.op->value(x).dot(xbar - x) + base - psi.value(x); };
  auto grad = [&](const Vector& x) {
    return Vector(inst.op->jacobian(x).transpose() * (xbar - x) - inst.op->value(x));
  };
  Rng rng(seed);
  std::vector<Vector> starts{xbar, inst.x0};
  if (inst.x_star) starts.push_back(*inst.x_star);
  for (int k = 0; k < 6; ++k) starts.push_back(sample_point(psi.domain(), rng, xbar));

  MeritValue m;
  m.mode = MeritMode::sample_lower_bound;
  m.value = 0.0;  // phi(xbar) = 0
  for (Vector x : starts) {
    x = psi.euclidean_prox(x, 0.0);
    double fx = phi(x);
    double h = 1.0;
    for (int it = 0; it < 300; ++it) {
      const Vector g = grad(x);
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        const Vector xn = psi.euclidean_prox(x + h * g, h);
        const double fn = phi(xn);
        if (fn >= fx + 1e-4 * (xn - x).squaredNorm() / h && (xn - x).norm() > 0.0) {
          x = xn;
          fx = fn;
          h *= 1.5;
          moved = true;
          break;
        }
        h *= 0.5;
      }
      if (!moved) break;
    }
    m.value = std::max(m.value, fx);
  }
  return m;
}

}  // namespace

MeritValue merit(const Vector& xbar, const ProblemInstance& inst, MeritMode mode, std::uint64_t seed) {
  if (xbar.size() != inst.dim() || !all_finite(xbar)) throw InvalidInput("merit: bad candidate point");
  if (!inst.psi.in_domain(xbar, 1e-8)) throw InvalidInput("merit: candidate outside dom psi");
  const AffineMap* map = inst.op->affine();
  if (mode == MeritMode::automatic) {
    if (map)
      mode = is_skew(map->a) ? MeritMode::closed_form : MeritMode::inner_solve;
    else
      mode = MeritMode::sample_lower_bound;
  }
  switch (mode) {
    case MeritMode::closed_form:
      if (!map || !is_skew(map->a)) throw Unsupported("merit: closed form needs an affine skew operator");
      return merit_closed_form(xbar, inst, *map);
    case MeritMode::inner_solve:
      if (!map) throw Unsupported("merit: inner solve needs an affine operator");
      return merit_inner_solve(xbar, inst, *map);
    case MeritMode::sample_lower_bound:
      return merit_sampled(xbar, inst, seed);
    case MeritMode::automatic:
      break;
  }
  throw Unsupported("merit: unknown mode");
}

// ---- certificates --------------------------------------------------------------

CertificateAccumulator::CertificateAccumulator(CertificateKind kind, const ProblemInstance& inst, double R0)
    : kind_(kind), inst_(&inst), R0_(R0), linear_(Vector::Zero(inst.dim())) {
  if (!(R0 > 0.0)) throw InvalidInput("CertificateAccumulator: R0 must be positive");
}

void CertificateAccumulator::add(double a, const Vector& x, const Vector& g) {
  if (!(a >= 0.0)) throw InvalidInput("CertificateAccumulator: negative weight");
  A_ += a;
  linear_ += a * g;
  scalar_ += a * g.dot(x);
  if (kind_ != CertificateKind::functional) psi_sum_ += a * inst_->psi.value(x, 1e-8);
}

CertificateValue CertificateAccumulator::value() const {
  CertificateValue out;
  if (A_ <= 0.0) return out;
  const bool with_psi = kind_ != CertificateKind::functional;
  const SupportQuery q =
      composite_support(-linear_, inst_->psi, inst_->metric, with_psi ? A_ : 0.0, inst_->x0, R0_);
  out.value = (scalar_ + (with_psi ? psi_sum_ : 0.0) + q.value) / A_;
  out.gap = q.gap / A_;
  return out;
}

double default_certificate_radius(const ProblemInstance& inst) {
  if (inst.R0) return *inst.R0;
  if (inst.x_star) {
    const double r = inst.metric.norm(inst.x0 - *inst.x_star);
    return r > 0.0 ? r * (1.0 + 1e-12) : 1e-12;
  }
  throw ConfigurationError("certificate: no R0 recorded and no known solution for '" + inst.name + "'");
}

}  // namespace rgvi
