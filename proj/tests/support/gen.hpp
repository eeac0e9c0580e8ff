// Random generators for property tests. Every case is driven by an explicit
// seed so a failure can be replayed by rerunning that one seed.
#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "rgvi/composite.hpp"
#include "rgvi/linalg.hpp"
#include "rgvi/metric.hpp"
#include "rgvi/sets.hpp"

namespace gen {

struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin() { return integer(0, 1) == 1; }

  rgvi::Vector normal(rgvi::Index n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    rgvi::Vector v(n);
    for (rgvi::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
  }
  rgvi::Vector uniform_vec(rgvi::Index n, double lo, double hi) {
    rgvi::Vector v(n);
    for (rgvi::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  rgvi::Matrix normal_matrix(rgvi::Index r, rgvi::Index c) {
    rgvi::Matrix m(r, c);
    for (rgvi::Index j = 0; j < c; ++j) m.col(j) = normal(r);
    return m;
  }
  // Symmetric positive definite with eigenvalues in [lo, hi].
  rgvi::Matrix spd(rgvi::Index n, double lo, double hi) {
    const Eigen::HouseholderQR<rgvi::Matrix> qr(normal_matrix(n, n));
    const rgvi::Matrix u = qr.householderQ();
    return u * uniform_vec(n, lo, hi).asDiagonal() * u.transpose();
  }
  rgvi::Matrix skew(rgvi::Index n) {
    const rgvi::Matrix g = normal_matrix(n, n);
    return g - g.transpose();
  }

  rgvi::SimpleSet set(rgvi::Index n) {
    switch (integer(0, 4)) {
      case 0: return rgvi::SimpleSet::whole_space(n);
      case 1: {
        const rgvi::Vector lo = uniform_vec(n, -2.0, 0.0);
        return rgvi::SimpleSet::box(lo, lo + uniform_vec(n, 0.1, 3.0));
      }
      case 2: return rgvi::SimpleSet::ball(normal(n), uniform(0.2, 3.0));
      case 3: return rgvi::SimpleSet::simplex(n, uniform(0.5, 2.0));
      default: {
        if (n < 2) return rgvi::SimpleSet::simplex(n);
        const rgvi::Index k = integer(1, static_cast<int>(n) - 1);
        return rgvi::SimpleSet::product(
            {rgvi::SimpleSet::simplex(k), rgvi::SimpleSet::ball(rgvi::Vector::Zero(n - k), uniform(0.5, 2.0))});
      }
    }
  }
  rgvi::CompositeTerm composite(rgvi::Index n) {
    switch (integer(0, 2)) {
      case 0: return rgvi::CompositeTerm::zero(n);
      case 1: return rgvi::CompositeTerm::l1(n, uniform(0.05, 2.0));
      default: return rgvi::CompositeTerm::indicator(set(n));
    }
  }
  rgvi::Metric metric(rgvi::Index n) {
    switch (integer(0, 2)) {
      case 0: return rgvi::Metric::identity(n);
      case 1: return rgvi::Metric::diagonal(uniform_vec(n, 0.3, 3.0));
      default: return rgvi::Metric::dense(spd(n, 0.3, 3.0));
    }
  }
};

}  // namespace gen
