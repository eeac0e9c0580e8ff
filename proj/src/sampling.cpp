#include "rgvi/sampling.hpp"

namespace rgvi {

Vector random_normal(Index n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

Vector random_uniform(Index n, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

Matrix random_uniform_matrix(Index rows, Index cols, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

Vector sample_point(const SimpleSet& set, Rng& rng, const Vector& around, double scale) {
  Vector x(set.dim());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (const auto& b : set.blocks()) {
    auto seg = x.segment(b.offset, b.size);
    switch (b.kind) {
      case SetKind::whole_space:
        seg = around.segment(b.offset, b.size) + scale * random_normal(b.size, rng);
        break;
      case SetKind::box:
        for (Index i = 0; i < b.size; ++i) {
          const double lo = std::isfinite(b.lower(i)) ? b.lower(i) : around(b.offset + i) - 3.0 * scale;
          const double hi = std::isfinite(b.upper(i)) ? b.upper(i) : around(b.offset + i) + 3.0 * scale;
          seg(i) = lo + (hi - lo) * unit(rng);
        }
        break;
      case SetKind::ball: {
        Vector dir = random_normal(b.size, rng);
        dir.normalize();
        const double r = b.radius * std::pow(unit(rng), 1.0 / static_cast<double>(b.size));
        seg = b.center + r * dir;
        break;
      }
      case SetKind::simplex: {
        for (Index i = 0; i < b.size; ++i) seg(i) = expo(rng);
        seg *= b.total / seg.sum();
        break;
      }
    }
  }
  return x;
}

}  // namespace rgvi
