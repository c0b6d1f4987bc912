#pragma once

#include <limits>
#include <vector>

#include "asymgame/dynamics.hpp"
#include "asymgame/lp.hpp"
#include "asymgame/measures.hpp"
#include "asymgame/transport.hpp"

namespace asymgame {

// Zero-sum matrix game: the row player minimizes x^T A y, the column player
// maximizes it.
struct MatrixGame {
  DenseMatrix payoff;
};

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_mix;
  std::vector<double> col_mix;
  // max_j (x^T A)_j - min_i (A y)_i for the returned mixes.
  double duality_gap = 0.0;
};

MatrixGameSolution solve_matrix_game(const MatrixGame& game);

// Certificate gap of an arbitrary pair of mixes.
double duality_gap(const DenseMatrix& a, const std::vector<double>& row_mix,
                   const std::vector<double>& col_mix);

struct HamiltonianQuery {
  const ControlProblem* problem;
  ProjectionField field;  // field.base is the measure argument
};

// sup over mixes on the v grid of sum_j w_j min_u sum_v q_v <f(y_j,u,v), p_j>,
// as one LP (the inner infimum over mixed u is attained at a pure u).
double eval_H(const HamiltonianQuery& q);

// Same LP with the maximizer restricted to a subset of the v grid.
double eval_Hn(const HamiltonianQuery& q, const std::vector<Point>& coarse_v_grid);

// Sampled sup over (x, u, fine v) of |f(x,u,v) - f(x,u,v')|, v' the nearest
// coarse point (lowest index on ties). Throws if a fine point lies farther
// than covering_radius from every coarse point.
double gamma_n(const ControlProblem& problem, const std::vector<Point>& fine_v,
               const std::vector<Point>& coarse_v,
               const std::vector<Point>& sample_points,
               double covering_radius = std::numeric_limits<double>::infinity());

// Nested coarsening of a grid: the shortest farthest-point prefix (seeded at
// index 0) whose covering radius is <= radius, in original grid order.
std::vector<Point> coarsen_grid(const std::vector<Point>& grid, double radius);

}  // namespace asymgame
