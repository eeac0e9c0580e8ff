#pragma once

#include "rgvi/linalg.hpp"

namespace rgvi {

// Equilibrium of the matrix game min_{x in Delta_n} max_{y in Delta_m} <A x, y>.
struct GameSolution {
  Vector x;  // minimizing player, size n
  Vector y;  // maximizing player, size m
  double value = 0.0;
  int pivots = 0;
};

// Solves the game through the standard LP reformulation with a dense
// tableau simplex (Bland's rule), reading the opponent's strategy off the
// optimal dual prices.
GameSolution solve_matrix_game(const Matrix& a);

// max_i (A x)_i - min_j (A^T y)_j, the duality gap of a strategy pair.
double game_gap(const Matrix& a, const Vector& x, const Vector& y);

}  // namespace rgvi
