#include "asymgame/game_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "asymgame/errors.hpp"

namespace asymgame {

double duality_gap(const DenseMatrix& a, const std::vector<double>& row_mix,
                   const std::vector<double>& col_mix) {
  double best_col = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += row_mix[i] * a(i, j);
    best_col = std::max(best_col, s);
  }
  double best_row = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * col_mix[j];
    best_row = std::min(best_row, s);
  }
  return best_col - best_row;
}

MatrixGameSolution solve_matrix_game(const MatrixGame& game) {
  const DenseMatrix& a = game.payoff;
  const std::size_t m = a.rows(), k = a.cols();
  if (m == 0 || k == 0) throw InvalidArgument("matrix game needs at least one row and column");
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(a(i, j))) throw InvalidArgument("matrix game has a non-finite entry");
      lo = std::min(lo, a(i, j));
    }
  }
  // Shifted game has entries >= 1, hence a value >= 1. With x' = x / value the
  // minimizer's problem becomes  max 1.x'  s.t.  A'^T x' <= 1, x' >= 0; the
  // duals of that LP, rescaled, are the maximizer's mix.
  const double shift = 1.0 - lo;
  DenseMatrix at(k, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) at(j, i) = a(i, j) + shift;
  }
  const LpSolution lp =
      maximize_leq(std::vector<double>(m, 1.0), at, std::vector<double>(k, 1.0));
  if (!(lp.objective > 0.0)) throw SolverFailure("matrix game LP returned a zero objective", lp.iterations);

  MatrixGameSolution sol;
  const auto normalize = [](std::vector<double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
    return v;
  };
  sol.row_mix = normalize(lp.x);
  sol.col_mix = normalize(lp.duals);
  // Value as the midpoint of the certified bracket.
  double upper = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += sol.row_mix[i] * a(i, j);
    upper = std::max(upper, s);
  }
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += a(i, j) * sol.col_mix[j];
    lower = std::min(lower, s);
  }
  sol.duality_gap = upper - lower;
  sol.value = 0.5 * (upper + lower);
  return sol;
}

namespace {

double hamiltonian_lp(const HamiltonianQuery& q, const std::vector<Point>& v_grid) {
  if (q.problem == nullptr) throw InvalidArgument("Hamiltonian query without a problem");
  const ControlProblem& prob = *q.problem;
  const ParticleMeasure& base = q.field.base;
  if (base.dim() != prob.dim) throw InvalidArgument("Hamiltonian: measure/problem dimension mismatch");
  if (q.field.vectors.size() != base.size()) throw InvalidArgument("Hamiltonian: field size mismatch");
  if (v_grid.empty()) throw InvalidArgument("Hamiltonian: empty v grid");

  const std::size_t nu = prob.u_grid.size(), nv = v_grid.size();
  std::vector<MaxMinBlock> blocks;
  blocks.reserve(base.size());
  Point fx(prob.dim);
  for (std::size_t j = 0; j < base.size(); ++j) {
    const Point& p = q.field.vectors[j];
    if (static_cast<int>(p.size()) != prob.dim) throw InvalidArgument("Hamiltonian: field vector dimension");
    MaxMinBlock blk{base.weight(j), DenseMatrix(nu, nv)};
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t v = 0; v < nv; ++v) {
        prob.f(base.point(j), prob.u_grid[u], v_grid[v], fx);
        double dot = 0.0;
        for (int c = 0; c < prob.dim; ++c) dot += fx[c] * p[c];
        blk.rows(u, v) = dot;
      }
    }
    blocks.push_back(std::move(blk));
  }
  return solve_max_min(blocks).value;
}

}  // namespace

double eval_H(const HamiltonianQuery& q) {
  return hamiltonian_lp(q, q.problem ? q.problem->v_grid : std::vector<Point>{});
}

double eval_Hn(const HamiltonianQuery& q, const std::vector<Point>& coarse_v_grid) {
  if (coarse_v_grid.empty()) throw InvalidArgument("eval_Hn: coarse grid is empty");
  return hamiltonian_lp(q, coarse_v_grid);
}

namespace {

std::size_t nearest(const std::vector<Point>& grid, const Point& v, double* dist2) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d2 = squared_distance(grid[i], v);
    if (d2 < bd) {
      bd = d2;
      best = i;
    }
  }
  if (dist2) *dist2 = bd;
  return best;
}

}  // namespace

double gamma_n(const ControlProblem& problem, const std::vector<Point>& fine_v,
               const std::vector<Point>& coarse_v,
               const std::vector<Point>& sample_points, double covering_radius) {
  if (sample_points.empty()) throw InvalidArgument("gamma_n: empty sample set");
  if (coarse_v.empty() || fine_v.empty()) throw InvalidArgument("gamma_n: empty grid");
  std::vector<std::size_t> proj(fine_v.size());
  for (std::size_t i = 0; i < fine_v.size(); ++i) {
    double d2 = 0.0;
    proj[i] = nearest(coarse_v, fine_v[i], &d2);
    if (std::sqrt(d2) > covering_radius + 1e-12) {
      throw InvalidArgument("gamma_n: fine grid point " + std::to_string(i) +
                            " is outside the covering radius");
    }
  }
  Point a(problem.dim), b(problem.dim);
  double sup = 0.0;
  for (const auto& x : sample_points) {
    for (const auto& u : problem.u_grid) {
      for (std::size_t i = 0; i < fine_v.size(); ++i) {
        problem.f(x, u, fine_v[i], a);
        problem.f(x, u, coarse_v[proj[i]], b);
        sup = std::max(sup, std::sqrt(squared_distance(a, b)));
      }
    }
  }
  return sup;
}

std::vector<Point> coarsen_grid(const std::vector<Point>& grid, double radius) {
  if (grid.empty()) throw InvalidArgument("coarsen_grid: empty grid");
  std::vector<bool> chosen(grid.size(), false);
  std::vector<double> dist(grid.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  while (true) {
    chosen[next] = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      dist[i] = std::min(dist[i], std::sqrt(squared_distance(grid[i], grid[next])));
    }
    double far = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (dist[i] > far) {
        far = dist[i];
        next = i;
      }
    }
    if (far <= radius) break;
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (chosen[i]) out.push_back(grid[i]);
  }
  return out;
}

}  // namespace asymgame
