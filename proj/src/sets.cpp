#include "rgvi/sets.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "rgvi/errors.hpp"

namespace rgvi {

const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::whole_space: return "whole_space";
    case SetKind::box: return "box";
    case SetKind::ball: return "ball";
    case SetKind::simplex: return "simplex";
  }
  return "unknown";
}

Vector project_simplex(const Vector& y, double total) {
  const Index n = y.size();
  Vector sorted = y;
  std::sort(sorted.data(), sorted.data() + n, std::greater<double>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (Index k = 0; k < n; ++k) {
    cumulative += sorted(k);
    const double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (k + 1 == n || sorted(k + 1) <= candidate) {
      threshold = candidate;
      break;
    }
  }
  return (y.array() - threshold).max(0.0).matrix();
}

SimpleSet SimpleSet::whole_space(Index dim) {
  if (dim < 1) throw InvalidInput("SimpleSet: dimension must be positive");
  SimpleSet s;
  s.dim_ = dim;
  SetBlock b;
  b.kind = SetKind::whole_space;
  b.size = dim;
  s.blocks_.push_back(std::move(b));
  return s;
}

SimpleSet SimpleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() < 1)
    throw InvalidInput("SimpleSet::box: bound size mismatch");
  if ((lower.array() > upper.array()).any()) throw InvalidInput("SimpleSet::box: empty box");
  SimpleSet s;
  s.dim_ = lower.size();
  SetBlock b;
  b.kind = SetKind::box;
  b.size = s.dim_;
  b.lower = std::move(lower);
  b.upper = std::move(upper);
  s.blocks_.push_back(std::move(b));
  return s;
}

SimpleSet SimpleSet::ball(Vector center, double radius) {
  if (center.size() < 1 || !(radius >= 0.0) || !std::isfinite(radius) || !center.allFinite())
    throw InvalidInput("SimpleSet::ball: invalid center or radius");
  SimpleSet s;
  s.dim_ = center.size();
  SetBlock b;
  b.kind = SetKind::ball;
  b.size = s.dim_;
  b.center = std::move(center);
  b.radius = radius;
  s.blocks_.push_back(std::move(b));
  return s;
}

SimpleSet SimpleSet::simplex(Index dim, double total) {
  if (dim < 1 || !(total > 0.0)) throw InvalidInput("SimpleSet::simplex: invalid dimension or total");
  SimpleSet s;
  s.dim_ = dim;
  SetBlock b;
  b.kind = SetKind::simplex;
  b.size = dim;
  b.total = total;
  s.blocks_.push_back(std::move(b));
  return s;
}

SimpleSet SimpleSet::product(const std::vector<SimpleSet>& parts) {
  if (parts.empty()) throw InvalidInput("SimpleSet::product: no factors");
  SimpleSet s;
  for (const auto& part : parts) {
    for (SetBlock b : part.blocks_) {
      b.offset += s.dim_;
      s.blocks_.push_back(std::move(b));
    }
    s.dim_ += part.dim_;
  }
  return s;
}

bool SimpleSet::bounded() const {
  return std::none_of(blocks_.begin(), blocks_.end(), [](const SetBlock& b) {
    return b.kind == SetKind::whole_space ||
           (b.kind == SetKind::box && !(b.lower.allFinite() && b.upper.allFinite()));
  });
}

bool SimpleSet::is_whole_space() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const SetBlock& b) {
    return b.kind == SetKind::whole_space ||
           (b.kind == SetKind::box && (b.lower.array() == -kInfinity).all() &&
            (b.upper.array() == kInfinity).all());
  });
}

bool SimpleSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  for (const auto& b : blocks_) {
    const auto xs = x.segment(b.offset, b.size);
    switch (b.kind) {
      case SetKind::whole_space:
        break;
      case SetKind::box:
        if ((xs.array() < b.lower.array() - tol).any() || (xs.array() > b.upper.array() + tol).any())
          return false;
        break;
      case SetKind::ball:
        if ((xs - b.center).norm() > b.radius + tol) return false;
        break;
      case SetKind::simplex:
        if ((xs.array() < -tol).any() || std::abs(xs.sum() - b.total) > tol * (1.0 + b.size))
          return false;
        break;
    }
  }
  return true;
}

Vector SimpleSet::project(const Vector& x) const {
  if (x.size() != dim_) throw InvalidInput("SimpleSet::project: dimension mismatch");
  Vector out = x;
  for (const auto& b : blocks_) {
    auto seg = out.segment(b.offset, b.size);
    switch (b.kind) {
      case SetKind::whole_space:
        break;
      case SetKind::box:
        seg = seg.cwiseMax(b.lower).cwiseMin(b.upper);
        break;
      case SetKind::ball: {
        const Vector d = seg - b.center;
        const double nrm = d.norm();
        if (nrm > b.radius) seg = b.center + (b.radius / nrm) * d;
        break;
      }
      case SetKind::simplex:
        seg = project_simplex(seg, b.total);
        break;
    }
  }
  return out;
}

Matrix SimpleSet::projection_jacobian(const Vector& u) const {
  Matrix jac = Matrix::Zero(dim_, dim_);
  const Vector p = project(u);
  for (const auto& b : blocks_) {
    auto block = jac.block(b.offset, b.offset, b.size, b.size);
    switch (b.kind) {
      case SetKind::whole_space:
        block.setIdentity();
        break;
      case SetKind::box:
        for (Index i = 0; i < b.size; ++i) {
          const double ui = u(b.offset + i);
          block(i, i) = (ui > b.lower(i) && ui < b.upper(i)) ? 1.0 : 0.0;
        }
        break;
      case SetKind::ball: {
        const Vector d = u.segment(b.offset, b.size) - b.center;
        const double nrm = d.norm();
        if (nrm <= b.radius) {
          block.setIdentity();
        } else {
          const Vector w = d / nrm;
          block = (b.radius / nrm) * (Matrix::Identity(b.size, b.size) - w * w.transpose());
        }
        break;
      }
      case SetKind::simplex: {
        std::vector<Index> active;
        for (Index i = 0; i < b.size; ++i)
          if (p(b.offset + i) > 0.0) active.push_back(i);
        const double inv = 1.0 / static_cast<double>(active.size());
        for (Index i : active)
          for (Index j : active) block(i, j) = (i == j ? 1.0 : 0.0) - inv;
        break;
      }
    }
  }
  return jac;
}

SupportResult SimpleSet::support(const Vector& s) const {
  if (s.size() != dim_) throw InvalidInput("SimpleSet::support: dimension mismatch");
  SupportResult r;
  r.argmax = Vector::Zero(dim_);
  for (const auto& b : blocks_) {
    const auto ss = s.segment(b.offset, b.size);
    auto xs = r.argmax.segment(b.offset, b.size);
    switch (b.kind) {
      case SetKind::whole_space:
        if (ss.cwiseAbs().maxCoeff() > 0.0)
          throw Unsupported("support function of an unbounded set in a nonzero direction");
        break;
      case SetKind::box:
        for (Index i = 0; i < b.size; ++i) {
          const double bound = ss(i) >= 0.0 ? b.upper(i) : b.lower(i);
          if (ss(i) != 0.0 && !std::isfinite(bound))
            throw Unsupported("support function of an unbounded box in a nonzero direction");
          xs(i) = ss(i) == 0.0 ? std::clamp(0.0, b.lower(i), b.upper(i)) : bound;
          r.value += ss(i) * xs(i);
        }
        break;
      case SetKind::ball: {
        const double nrm = ss.norm();
        xs = nrm > 0.0 ? Vector(b.center + (b.radius / nrm) * ss) : b.center;
        r.value += ss.dot(b.center) + b.radius * nrm;
        break;
      }
      case SetKind::simplex: {
        Index best = 0;
        ss.maxCoeff(&best);
        xs(best) = b.total;
        r.value += b.total * ss(best);
        break;
      }
    }
  }
  return r;
}

double SimpleSet::max_distance(const Vector& x) const {
  double sq = 0.0;
  for (const auto& b : blocks_) {
    const auto xs = x.segment(b.offset, b.size);
    switch (b.kind) {
      case SetKind::whole_space:
        return kInfinity;
      case SetKind::box:
        for (Index i = 0; i < b.size; ++i) {
          const double d = std::max(std::abs(xs(i) - b.lower(i)), std::abs(b.upper(i) - xs(i)));
          if (!std::isfinite(d)) return kInfinity;
          sq += d * d;
        }
        break;
      case SetKind::ball: {
        const double d = (xs - b.center).norm() + b.radius;
        sq += d * d;
        break;
      }
      case SetKind::simplex: {
        // A convex function attains its max over the simplex at a vertex.
        const double base = xs.squaredNorm();
        double best = 0.0;
        for (Index i = 0; i < b.size; ++i)
          best = std::max(best, base - 2.0 * b.total * xs(i) + b.total * b.total);
        sq += best;
        break;
      }
    }
  }
  return std::sqrt(sq);
}

double SimpleSet::diameter() const {
  double sq = 0.0;
  for (const auto& b : blocks_) {
    switch (b.kind) {
      case SetKind::whole_space:
        return kInfinity;
      case SetKind::box:
        sq += (b.upper - b.lower).squaredNorm();
        break;
      case SetKind::ball:
        sq += 4.0 * b.radius * b.radius;
        break;
      case SetKind::simplex:
        if (b.size > 1) sq += 2.0 * b.total * b.total;
        break;
    }
  }
  return std::isfinite(sq) ? std::sqrt(sq) : kInfinity;
}

std::string SimpleSet::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) os << " x ";
    os << to_string(blocks_[i].kind) << "(" << blocks_[i].size << ")";
  }
  return os.str();
}

}  // namespace rgvi
