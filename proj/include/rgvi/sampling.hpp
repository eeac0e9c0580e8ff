#pragma once

#include <random>

#include "rgvi/sets.hpp"

namespace rgvi {

using Rng = std::mt19937_64;

Vector random_normal(Index n, Rng& rng);
Vector random_uniform(Index n, double lo, double hi, Rng& rng);
Matrix random_uniform_matrix(Index rows, Index cols, double lo, double hi, Rng& rng);

// A random point of the set. Unbounded blocks are sampled as Gaussians with
// standard deviation `scale` around the matching coordinates of `around`.
Vector sample_point(const SimpleSet& set, Rng& rng, const Vector& around, double scale = 1.0);

}  // namespace rgvi
