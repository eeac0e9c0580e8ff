#include "rgvi/composite.hpp"

#include <sstream>

#include "rgvi/errors.hpp"

namespace rgvi {

const char* to_string(CompositeKind kind) {
  switch (kind) {
    case CompositeKind::zero: return "zero";
    case CompositeKind::indicator: return "indicator";
    case CompositeKind::l1: return "l1";
  }
  return "unknown";
}

CompositeTerm CompositeTerm::zero(Index dim) {
  CompositeTerm t;
  t.kind_ = CompositeKind::zero;
  t.domain_ = SimpleSet::whole_space(dim);
  return t;
}

CompositeTerm CompositeTerm::indicator(SimpleSet set) {
  CompositeTerm t;
  t.kind_ = set.is_whole_space() ? CompositeKind::zero : CompositeKind::indicator;
  t.domain_ = std::move(set);
  return t;
}

CompositeTerm CompositeTerm::l1(Index dim, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw InvalidInput("CompositeTerm::l1: invalid weight");
  CompositeTerm t;
  t.kind_ = CompositeKind::l1;
  t.domain_ = SimpleSet::whole_space(dim);
  t.l1_weight_ = weight;
  return t;
}

double CompositeTerm::value(const Vector& x, double tol) const {
  if (!domain_.contains(x, tol)) return kInfinity;
  return kind_ == CompositeKind::l1 ? l1_weight_ * x.lpNorm<1>() : 0.0;
}

Vector CompositeTerm::euclidean_prox(const Vector& u, double weight) const {
  switch (kind_) {
    case CompositeKind::zero:
      return u;
    case CompositeKind::indicator:
      return domain_.project(u);
    case CompositeKind::l1: {
      const double thr = weight * l1_weight_;
      return (u.array().sign() * (u.array().abs() - thr).max(0.0)).matrix();
    }
  }
  return u;
}

Matrix CompositeTerm::euclidean_prox_jacobian(const Vector& u, double weight) const {
  switch (kind_) {
    case CompositeKind::zero:
      return Matrix::Identity(u.size(), u.size());
    case CompositeKind::indicator:
      return domain_.projection_jacobian(u);
    case CompositeKind::l1: {
      const double thr = weight * l1_weight_;
      return (u.array().abs() > thr).cast<double>().matrix().asDiagonal();
    }
  }
  return Matrix::Identity(u.size(), u.size());
}

Vector CompositeTerm::subgradient(const Vector& x) const {
  if (kind_ == CompositeKind::l1) return (l1_weight_ * x.array().sign()).matrix();
  return Vector::Zero(x.size());
}

std::string CompositeTerm::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ == CompositeKind::indicator) os << "[" << domain_.describe() << "]";
  if (kind_ == CompositeKind::l1) os << "[w=" << l1_weight_ << "]";
  return os.str();
}

}  // namespace rgvi
