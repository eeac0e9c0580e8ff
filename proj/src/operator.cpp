#include "rgvi/operator.hpp"

#include <sstream>

#include "rgvi/errors.hpp"

namespace rgvi {

AffineOperator::AffineOperator(Matrix a, Vector b, double offset)
    : Operator(a.rows(), 2), map_{std::move(a), std::move(b)}, offset_(offset) {
  if (map_.a.rows() != map_.a.cols() || map_.b.size() != map_.a.rows() || map_.a.rows() < 1)
    throw InvalidInput("AffineOperator: dimension mismatch");
  if (!map_.a.allFinite() || !map_.b.allFinite()) throw InvalidInput("AffineOperator: non-finite data");
  symmetric_ = (map_.a - map_.a.transpose()).norm() <= 1e-14 * std::max(1.0, map_.a.norm());
  constants().derivative_bound[1] = spectral_norm(map_.a);
  constants().derivative_bound[2] = 0.0;
  constants().derivative_bound[3] = 0.0;
  if (symmetric_) {
    constants().lipschitz[1] = constants().derivative_bound[1];
    constants().lipschitz[2] = 0.0;
  }
  const Matrix sym = 0.5 * (map_.a + map_.a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double mu = es.eigenvalues().minCoeff();
  constants().uniform_monotone[2] = mu > 1e-14 ? mu : 0.0;
}

std::optional<double> AffineOperator::potential(const Vector& x) const {
  if (!symmetric_) return std::nullopt;
  return 0.5 * x.dot(map_.a * x) + map_.b.dot(x) + offset_;
}

std::string AffineOperator::describe() const {
  std::ostringstream os;
  os << "affine(n=" << dim() << (symmetric_ ? ", gradient" : "") << ")";
  return os.str();
}

ChainedCubicGradient::ChainedCubicGradient(Index n) : Operator(n, 2), links_(Matrix::Zero(n, n)) {
  if (n < 1) throw InvalidInput("ChainedCubicGradient: n must be >= 1");
  links_(0, 0) = 1.0;
  for (Index i = 1; i < n; ++i) {
    links_(i, i) = 1.0;
    links_(i, i - 1) = -2.0;
  }
  // ||grad^2 f(x) - grad^2 f(y)|| <= 6 max_i |<a_i, x - y>| ||L||^2 <= 6 max_i ||a_i|| ||L||^2 ||x - y||.
  const double l_norm = spectral_norm(links_);
  const double row_max = links_.rowwise().norm().maxCoeff();
  constants().lipschitz[2] = 6.0 * row_max * l_norm * l_norm;
  constants().derivative_bound[2] = constants().lipschitz[2];
  constants().uniform_monotone[2] = 0.0;
}

double ChainedCubicGradient::f(const Vector& x) const {
  const Vector l = links_ * x;
  return l.array().abs().cube().sum();
}

Vector ChainedCubicGradient::value(const Vector& x) const {
  const Vector l = links_ * x;
  return links_.transpose() * (3.0 * l.array() * l.array().abs()).matrix();
}

Matrix ChainedCubicGradient::jacobian(const Vector& x) const {
  const Vector l = links_ * x;
  return links_.transpose() * (6.0 * l.array().abs()).matrix().asDiagonal() * links_;
}

Vector ChainedCubicGradient::second_derivative(const Vector& x, const Vector& h1,
                                               const Vector& h2) const {
  const Vector l = links_ * x;
  const Vector p1 = links_ * h1;
  const Vector p2 = links_ * h2;
  return links_.transpose() * (6.0 * l.array().sign() * p1.array() * p2.array()).matrix();
}

std::string ChainedCubicGradient::describe() const {
  return "chained_cubic_gradient(n=" + std::to_string(dim()) + ")";
}

CurvedAffineOperator::CurvedAffineOperator(Matrix a, Vector b, Vector center, double kappa)
    : Operator(a.rows(), 2), a_(std::move(a)), b_(std::move(b)), center_(std::move(center)), kappa_(kappa) {
  if (a_.rows() != a_.cols() || b_.size() != a_.rows() || center_.size() != a_.rows())
    throw InvalidInput("CurvedAffineOperator: dimension mismatch");
  if (!(kappa_ >= 0.0)) throw InvalidInput("CurvedAffineOperator: kappa must be nonnegative");
  // D V(y) - D V(x) = diag(2 kappa (|y - c| - |x - c|)), so ||D^2 V|| <= 2 kappa.
  constants().derivative_bound[2] = 2.0 * kappa_;
  constants().derivative_bound[3] = 0.0;
}

Vector CurvedAffineOperator::value(const Vector& x) const {
  const Eigen::ArrayXd d = (x - center_).array();
  return a_ * x + b_ + (kappa_ * d * d.abs()).matrix();
}

Matrix CurvedAffineOperator::jacobian(const Vector& x) const {
  Matrix j = a_;
  j.diagonal() += (2.0 * kappa_ * (x - center_).array().abs()).matrix();
  return j;
}

Vector CurvedAffineOperator::second_derivative(const Vector& x, const Vector& h1,
                                               const Vector& h2) const {
  return (2.0 * kappa_ * (x - center_).array().sign() * h1.array() * h2.array()).matrix();
}

std::string CurvedAffineOperator::describe() const {
  std::ostringstream os;
  os << "curved_affine(n=" << dim() << ", kappa=" << kappa_ << ")";
  return os.str();
}

}  // namespace rgvi
