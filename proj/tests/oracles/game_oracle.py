"""Reference values for matrix games, computed with scipy's HiGHS LP solver.

Writes tests/data/games.json: for each game the payoff matrix A (m x n), the
value of min_{x in simplex_n} max_{y in simplex_m} <Ax, y>, and one optimal
strategy pair. The C++ tests rebuild the instances from the stored matrices.
"""
import json
import pathlib

import numpy as np
from scipy.optimize import linprog


def solve(a):
    m, n = a.shape
    # min_x max_i (Ax)_i  ->  min w  s.t.  Ax <= w 1, sum x = 1, x >= 0.
    c = np.r_[np.zeros(n), 1.0]
    a_ub = np.c_[a, -np.ones(m)]
    a_eq = np.r_[np.ones(n), 0.0][None, :]
    bounds = [(0, None)] * n + [(None, None)]
    px = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    # max_y min_j (A^T y)_j  ->  min -w  s.t.  w 1 <= A^T y.
    a_ub = np.c_[-a.T, np.ones(n)]
    a_eq = np.r_[np.ones(m), 0.0][None, :]
    bounds = [(0, None)] * m + [(None, None)]
    py = linprog(np.r_[np.zeros(m), -1.0], A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=[1.0], bounds=bounds,
                 method="highs")
    assert px.status == 0 and py.status == 0
    x, y = px.x[:n], py.x[:m]
    return px.x[-1], x, y


def main():
    games = []
    rng = np.random.default_rng(20240611)
    mats = [np.array([[1.0, -1.0], [-1.0, 1.0]]), np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])]
    mats += [rng.uniform(-1.0, 1.0, size=(10, 10)) for _ in range(3)]
    mats += [rng.uniform(-1.0, 1.0, size=(7, 12)), rng.uniform(-1.0, 1.0, size=(20, 20))]
    for a in mats:
        value, x, y = solve(a)
        gap = float(np.max(a @ x) - np.min(a.T @ y))
        games.append({"A": a.tolist(), "value": float(value), "x": x.tolist(), "y": y.tolist(), "gap": gap})
    out = pathlib.Path(__file__).resolve().parents[1] / "data" / "games.json"
    out.write_text(json.dumps({"generator": "scipy.optimize.linprog (highs)", "games": games}, indent=1))
    print(f"wrote {len(games)} games to {out}")


if __name__ == "__main__":
    main()
