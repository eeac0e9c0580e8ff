#include "rgvi/metric.hpp"

#include <algorithm>

#include "rgvi/errors.hpp"

namespace rgvi {

Metric Metric::identity(Index dim) {
  if (dim < 1) throw InvalidInput("Metric: dimension must be positive");
  Metric m;
  m.kind_ = Kind::identity;
  m.dim_ = dim;
  m.diag_ = Vector::Ones(dim);
  return m;
}

Metric Metric::diagonal(Vector weights) {
  if (weights.size() < 1 || !weights.allFinite() || (weights.array() <= 0.0).any())
    throw InvalidInput("Metric::diagonal: weights must be finite and positive");
  Metric m;
  m.dim_ = weights.size();
  m.kind_ = (weights.array() == 1.0).all() ? Kind::identity : Kind::diagonal;
  m.diag_ = std::move(weights);
  return m;
}

Metric Metric::dense(Matrix b) {
  if (b.rows() != b.cols() || b.rows() < 1 || !b.allFinite())
    throw InvalidInput("Metric::dense: B must be a finite square matrix");
  const double scale = b.norm();
  if ((b - b.transpose()).norm() > 1e-12 * std::max(1.0, scale))
    throw InvalidInput("Metric::dense: B must be symmetric");
  Metric m;
  m.dim_ = b.rows();
  m.kind_ = Kind::dense;
  m.dense_ = 0.5 * (b + b.transpose());
  m.llt_.compute(m.dense_);
  if (m.llt_.info() != Eigen::Success) throw InvalidInput("Metric::dense: B must be positive definite");
  m.diag_ = m.dense_.diagonal();
  return m;
}

Vector Metric::apply(const Vector& x) const {
  switch (kind_) {
    case Kind::identity: return x;
    case Kind::diagonal: return diag_.cwiseProduct(x);
    case Kind::dense: return dense_ * x;
  }
  return x;
}

Vector Metric::apply_inverse(const Vector& g) const {
  switch (kind_) {
    case Kind::identity: return g;
    case Kind::diagonal: return g.cwiseQuotient(diag_);
    case Kind::dense: return llt_.solve(g);
  }
  return g;
}

Matrix Metric::matrix() const {
  if (kind_ == Kind::dense) return dense_;
  return diag_.asDiagonal();
}

double Metric::max_eigenvalue() const {
  if (kind_ != Kind::dense) return diag_.maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double Metric::min_eigenvalue() const {
  if (kind_ != Kind::dense) return diag_.minCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double Metric::norm(const Vector& x) const { return std::sqrt(std::max(0.0, apply(x).dot(x))); }

double Metric::dual_norm(const Vector& g) const {
  return std::sqrt(std::max(0.0, apply_inverse(g).dot(g)));
}

double dual_norm(const Vector& g, const Metric& metric) {
  if (g.size() != metric.dim()) throw InvalidInput("dual_norm: dimension mismatch");
  if (!g.allFinite()) throw InvalidInput("dual_norm: non-finite covector");
  return metric.dual_norm(g);
}

PowerProx::PowerProx(int degree, Metric metric) : degree_(degree), metric_(std::move(metric)) {
  if (degree_ < 2) throw InvalidInput("PowerProx: degree must be >= 2");
}

double PowerProx::value(const Vector& x) const {
  return std::pow(metric_.norm(x), degree_) / static_cast<double>(degree_);
}

Vector PowerProx::gradient(const Vector& x) const {
  const double r = metric_.norm(x);
  if (degree_ > 2 && r == 0.0) return Vector::Zero(x.size());
  return std::pow(r, degree_ - 2) * metric_.apply(x);
}

Matrix PowerProx::hessian(const Vector& x) const {
  const Matrix b = metric_.matrix();
  if (degree_ == 2) return b;
  const double r = metric_.norm(x);
  if (r == 0.0) return Matrix::Zero(x.size(), x.size());
  const Vector bx = metric_.apply(x);
  return std::pow(r, degree_ - 2) * (b + (degree_ - 2) * bx * bx.transpose() / (r * r));
}

double bregman(const Vector& x, const Vector& y, const Metric& metric) {
  const double r = metric.norm(x - y);
  return 0.5 * r * r;
}

namespace {

// Weighted projection onto {x >= 0, sum x = total}: x_i = max(y_i - tau / b_i, 0).
Vector weighted_simplex_projection(const Vector& y, const Vector& b, double total) {
  auto mass = [&](double tau) { return (y.array() - tau / b.array()).max(0.0).sum(); };
  double lo = ((y.array() - total) * b.array()).minCoeff();
  double hi = (y.array() * b.array()).maxCoeff();
  while (mass(lo) < total) lo -= std::max(1.0, std::abs(lo));
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > total ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  Vector x = (y.array() - tau / b.array()).max(0.0).matrix();
  const double s = x.sum();
  if (s > 0.0) x *= total / s;
  return x;
}

// argmin sum b_i (x_i - y_i)^2 / 2 s.t. ||x - c||_2 <= r.
Vector weighted_ball_projection(const Vector& y, const Vector& b, const Vector& c, double r) {
  const Vector d = y - c;
  if (d.norm() <= r) return y;
  auto point = [&](double lam) -> Vector {
    return (b.array() * d.array() / (b.array() + lam)).matrix();
  };
  double lo = 0.0;
  double hi = b.maxCoeff() * (d.norm() / std::max(r, 1e-300));
  while (point(hi).norm() > r) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (point(mid).norm() > r ? lo : hi) = mid;
  }
  const Vector p = point(hi);
  const double nrm = p.norm();
  return c + (nrm > r ? Vector(p * (r / nrm)) : p);
}

Vector diagonal_prox(const Vector& target, const CompositeTerm& psi, const Vector& b, double weight) {
  switch (psi.kind()) {
    case CompositeKind::zero:
      return target;
    case CompositeKind::l1: {
      const Eigen::ArrayXd thr = weight * psi.l1_weight() / b.array();
      return (target.array().sign() * (target.array().abs() - thr).max(0.0)).matrix();
    }
    case CompositeKind::indicator:
      break;
  }
  Vector out = target;
  for (const auto& blk : psi.domain().blocks()) {
    auto seg = out.segment(blk.offset, blk.size);
    const Vector bw = b.segment(blk.offset, blk.size);
    switch (blk.kind) {
      case SetKind::whole_space:
        break;
      case SetKind::box:
        seg = seg.cwiseMax(blk.lower).cwiseMin(blk.upper);
        break;
      case SetKind::ball:
        seg = weighted_ball_projection(seg, bw, blk.center, blk.radius);
        break;
      case SetKind::simplex:
        seg = weighted_simplex_projection(seg, bw, blk.total);
        break;
    }
  }
  return out;
}

}  // namespace

Vector metric_prox(const Vector& target, const CompositeTerm& psi, const Metric& metric,
                   double weight, ProxInfo* info) {
  if (info) *info = ProxInfo{};
  if (psi.kind() == CompositeKind::zero) return target;
  if (metric.is_identity()) return psi.euclidean_prox(target, weight);
  if (metric.is_diagonal()) return diagonal_prox(target, psi, metric.diagonal_weights(), weight);

  // Dense B: FISTA on 0.5||x - target||_B^2 + weight psi(x) with Euclidean prox of psi.
  const double lip = metric.max_eigenvalue();
  const double step = 1.0 / lip;
  Vector x = psi.euclidean_prox(target, step * weight);
  Vector y = x;
  double t = 1.0;
  double residual = kInfinity;
  const double scale = 1.0 + target.norm();
  int it = 0;
  for (; it < 100000; ++it) {
    const Vector grad = metric.apply(y - target);
    const Vector next = psi.euclidean_prox(y - step * grad, step * weight);
    const Vector fixed = psi.euclidean_prox(next - step * metric.apply(next - target), step * weight);
    residual = (fixed - next).norm() / step;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // Restart when the momentum stops helping.
    if ((next - x).dot(y - next) > 0.0) {
      y = next;
      t = 1.0;
    } else {
      y = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x = next;
    if (residual <= 1e-13 * scale * lip) break;
  }
  if (info) {
    info->residual = residual;
    info->inner_iterations = it;
  }
  if (!(residual <= 1e-8 * scale * lip))
    throw StepFailure("metric_prox: dense-metric inner solve did not converge", residual);
  return x;
}

Vector prox_step(const Vector& center, double h, const Vector& g, const CompositeTerm& psi,
                 const Metric& metric, PsiTreatment treatment, ProxInfo* info) {
  if (center.size() != metric.dim() || g.size() != metric.dim() || psi.dim() != metric.dim())
    throw InvalidInput("prox_step: dimension mismatch");
  if (!center.allFinite() || !g.allFinite() || !std::isfinite(h))
    throw InvalidInput("prox_step: non-finite input");
  if (h < 0.0) throw InvalidInput("prox_step: negative step size");
  if (!psi.in_domain(center, 1e-8)) throw InvalidInput("prox_step: infeasible center");
  if (info) *info = ProxInfo{};
  if (h == 0.0) return center;
  const Vector target = center - h * metric.apply_inverse(g);
  if (treatment == PsiTreatment::domain_only) {
    if (psi.kind() == CompositeKind::l1) return target;
    return metric_prox(target, psi, metric, 0.0, info);
  }
  return metric_prox(target, psi, metric, h, info);
}

}  // namespace rgvi
