#include "rgvi/game_lp.hpp"

#include "rgvi/errors.hpp"

namespace rgvi {

GameSolution solve_matrix_game(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (m < 1 || n < 1) throw InvalidInput("solve_matrix_game: empty matrix");
  if (!a.allFinite()) throw InvalidInput("solve_matrix_game: non-finite entries");

  // Shift to a positive payoff: min v s.t. A' x <= v 1 becomes max 1^T u s.t. A' u <= 1, u >= 0.
  const double shift = 1.0 - a.minCoeff();
  const Matrix ap = a.array() + shift;

  // Tableau rows 0..m-1: [A' | I | 1]; row m: objective [-1 | 0 | 0].
  const Index cols = n + m + 1;
  Matrix tab = Matrix::Zero(m + 1, cols);
  tab.block(0, 0, m, n) = ap;
  tab.block(0, n, m, m).setIdentity();
  tab.col(cols - 1).head(m).setOnes();
  tab.row(m).head(n).setConstant(-1.0);
  std::vector<Index> basis(m);
  for (Index i = 0; i < m; ++i) basis[i] = n + i;

  constexpr double eps = 1e-12;
  int pivots = 0;
  for (; pivots < 100000; ++pivots) {
    Index enter = -1;
    for (Index j = 0; j < n + m; ++j)
      if (tab(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    Index leave = -1;
    double best = kInfinity;
    for (Index i = 0; i < m; ++i) {
      if (tab(i, enter) > eps) {
        const double ratio = tab(i, cols - 1) / tab(i, enter);
        if (ratio < best - eps || (std::abs(ratio - best) <= eps && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) throw InvalidInput("solve_matrix_game: unbounded LP (should not happen)");
    tab.row(leave) /= tab(leave, enter);
    for (Index i = 0; i <= m; ++i)
      if (i != leave && tab(i, enter) != 0.0) tab.row(i) -= tab(i, enter) * tab.row(leave);
    basis[leave] = enter;
  }

  Vector u = Vector::Zero(n);
  for (Index i = 0; i < m; ++i)
    if (basis[i] < n) u(basis[i]) = tab(i, cols - 1);
  const Vector w = tab.row(m).segment(n, m).transpose().cwiseMax(0.0);
  const double total = u.sum();
  if (!(total > 0.0)) throw InvalidInput("solve_matrix_game: degenerate LP solution");

  GameSolution sol;
  sol.x = u / total;
  sol.y = w / w.sum();
  sol.value = 1.0 / total - shift;
  sol.pivots = pivots;
  return sol;
}

double game_gap(const Matrix& a, const Vector& x, const Vector& y) {
  return (a * x).maxCoeff() - (a.transpose() * y).minCoeff();
}

}  // namespace rgvi
