// Shared generators and independent oracles for the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "asymgame/dynamics.hpp"
#include "asymgame/measures.hpp"
#include "asymgame/value_solver.hpp"

namespace testing_support {

using asymgame::ControlProblem;
using asymgame::ParticleMeasure;
using asymgame::Point;
using asymgame::ProblemSpec;
using asymgame::StepControlSequence;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng_); }

  Point point(int d, double spread = 1.0) {
    Point p(d);
    for (double& c : p) c = real(-spread, spread);
    return p;
  }
  std::vector<Point> points(int n, int d, double spread = 1.0) {
    std::vector<Point> out;
    for (int i = 0; i < n; ++i) out.push_back(point(d, spread));
    return out;
  }
  std::vector<double> simplex(int n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (double& x : w) {
      x = real(0.05, 1.0);
      s += x;
    }
    for (double& x : w) x /= s;
    fix_sum(w);
    return w;
  }
  ParticleMeasure measure(int n, int d, double spread = 1.0) {
    return ParticleMeasure(points(n, d, spread), simplex(n));
  }
  ParticleMeasure uniform_measure(int n, int d, double spread = 1.0) {
    return ParticleMeasure::uniform(points(n, d, spread));
  }
  std::mt19937_64& engine() { return rng_; }

  // Pushes float drift into the last entry so sums are exactly representable.
  static void fix_sum(std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) s += w[i];
    w.back() = std::max(0.0, 1.0 - s);
  }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<Point> grid1(std::initializer_list<double> xs) {
  std::vector<Point> out;
  for (double x : xs) out.push_back({x});
  return out;
}

// Scalar x' = u + v with g = |x| (or the given terminal), the workhorse of
// the hand-checked examples.
inline ControlProblem u_plus_v(std::vector<Point> u, std::vector<Point> v, double T = 1.0,
                               asymgame::TerminalKind g = asymgame::TerminalKind::kAbs) {
  ProblemSpec s;
  s.kind = "u_plus_v";
  s.horizon = T;
  s.u_grid = std::move(u);
  s.v_grid = std::move(v);
  s.terminal.kind = g;
  return asymgame::build_problem(s);
}

inline ControlProblem frozen(int dim, std::vector<Point> u, std::vector<Point> v,
                             asymgame::TerminalKind g = asymgame::TerminalKind::kQuadratic) {
  ProblemSpec s;
  s.kind = "zero";
  s.dim = dim;
  s.u_dim = static_cast<int>(u.front().size());
  s.v_dim = static_cast<int>(v.front().size());
  s.u_grid = std::move(u);
  s.v_grid = std::move(v);
  s.terminal.kind = g;
  return asymgame::build_problem(s);
}

// Random scalar affine problem x' = a x + b u + c v + drift.
inline ControlProblem random_scalar_affine(Gen& gen, int nu, int nv, double T,
                                           asymgame::TerminalKind g) {
  ProblemSpec s;
  s.kind = "affine";
  s.horizon = T;
  s.a = {gen.real(-0.8, 0.8)};
  s.b = {gen.real(0.5, 1.5)};
  s.c = {gen.real(0.5, 1.5)};
  s.drift = {gen.real(-0.3, 0.3)};
  for (int i = 0; i < nu; ++i) s.u_grid.push_back({-1.0 + 2.0 * i / std::max(1, nu - 1)});
  for (int i = 0; i < nv; ++i) s.v_grid.push_back({-1.0 + 2.0 * i / std::max(1, nv - 1)});
  if (nu == 1) s.u_grid = {{gen.real(-1, 1)}};
  if (nv == 1) s.v_grid = {{gen.real(-1, 1)}};
  s.terminal.kind = g;
  s.terminal.offset = gen.real(-0.5, 0.5);
  s.terminal.c = {1.0};
  return asymgame::build_problem(s);
}

// Exhaustive W2 for equal-size uniform clouds: minimum over assignments.
inline double permutation_w2(const ParticleMeasure& a, const ParticleMeasure& b) {
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t k = 0; k < a.point(i).size(); ++k) {
        const double d = a.point(i)[k] - b.point(perm[i])[k];
        c += d * d;
      }
    }
    best = std::min(best, c / static_cast<double>(a.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best);
}

inline double expected_terminal(const ControlProblem& p, const ParticleMeasure& mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weight(i) * p.g(mu.point(i));
  return s;
}

// Every u-sequence of length n over `count` choices.
inline std::vector<StepControlSequence> all_sequences(int n, int count) {
  std::vector<StepControlSequence> out;
  StepControlSequence s;
  s.values.assign(n, 0);
  while (true) {
    out.push_back(s);
    int k = n - 1;
    while (k >= 0 && ++s.values[k] == count) s.values[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

// Independent best-response oracle: per atom, try every decision tree (own
// odometer over prefix nodes) and score it with payoff() on a single atom.
inline double exhaustive_best_response(const ControlProblem& prob, const ParticleMeasure& mu0,
                                       const asymgame::MixedStrategyII& q, int n) {
  const asymgame::SequenceSpace space(n, static_cast<int>(prob.v_grid.size()));
  const int nu = static_cast<int>(prob.u_grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    const ParticleMeasure atom = ParticleMeasure::dirac(mu0.point(i));
    asymgame::StrategyTreeI tree{n, space.v_count(),
                                 {std::vector<int>(space.prefix_nodes(), 0)}};
    double best = std::numeric_limits<double>::infinity();
    auto& d = tree.decisions[0];
    while (true) {
      best = std::min(best, asymgame::payoff(prob, atom, tree, q));
      std::size_t k = 0;
      while (k < d.size() && ++d[k] == nu) d[k++] = 0;
      if (k == d.size()) break;
    }
    total += mu0.weight(i) * best;
  }
  return total;
}


struct Fixture {
  std::string name;
  ControlProblem problem;
  ParticleMeasure mu0;
  int n;
};

// Small games inside the brute-force guards: n <= 2, grids of at most three
// points, at most three atoms.
inline std::vector<Fixture> value_fixtures() {
  using asymgame::TerminalKind;
  std::vector<Fixture> out;
  const auto pm = [](std::vector<Point> x, std::vector<double> w) {
    return ParticleMeasure(std::move(x), std::move(w));
  };
  const auto build = [](ProblemSpec s) { return asymgame::build_problem(std::move(s)); };

  out.push_back({"pennies_n1", u_plus_v(grid1({-1, 1}), grid1({-1, 1})), ParticleMeasure::dirac({0.0}), 1});
  out.push_back({"pennies_n2", u_plus_v(grid1({-1, 1}), grid1({-1, 1})), ParticleMeasure::dirac({0.0}), 2});
  out.push_back({"uv_two_atoms", u_plus_v(grid1({-1, 0, 1}), grid1({-1, 1})),
                 pm({{-0.5}, {0.5}}, {0.5, 0.5}), 2});
  out.push_back({"frozen", frozen(1, grid1({-1, 1}), grid1({-1, 1})),
                 pm({{-1.0}, {0.25}, {2.0}}, {0.2, 0.5, 0.3}), 2});
  {
    ProblemSpec s;
    s.kind = "affine";
    s.a = {-0.4};
    s.b = {1.0};
    s.c = {0.5};
    s.u_grid = grid1({-1, 0, 1});
    s.v_grid = grid1({0.3});
    out.push_back({"blind_v", build(s), pm({{-1.0}, {0.0}, {1.5}}, {0.3, 0.3, 0.4}), 2});
  }
  {
    ProblemSpec s;
    s.kind = "rotation";
    s.dim = s.u_dim = s.v_dim = 2;
    s.omega = 0.9;
    s.u_grid = {{1, 0}, {0, 1}, {-1, -1}};
    s.v_grid = {{-1, 0}, {0, -1}, {1, 1}};
    out.push_back({"rotation_n1", build(s), pm({{1, 0}, {0, -1}}, {0.5, 0.5}), 1});
  }
  {
    ProblemSpec s;
    s.kind = "pursuit";
    s.dim = s.u_dim = s.v_dim = 2;
    s.horizon = 0.8;
    s.u_grid = {{1, 0}, {0, 1}};
    s.v_grid = {{1, 0}, {0, 1}};
    s.terminal.kind = TerminalKind::kQuadratic;
    out.push_back({"pursuit_n2", build(s), pm({{0.5, 0.0}, {0.0, -0.5}}, {0.6, 0.4}), 2});
  }
  {
    Gen gen(101);
    out.push_back({"affine_u3v2", random_scalar_affine(gen, 3, 2, 1.0, TerminalKind::kAbs),
                   pm({{-0.7}, {0.1}, {0.9}}, {0.25, 0.25, 0.5}), 2});
    out.push_back({"affine_u2v3", random_scalar_affine(gen, 2, 3, 1.2, TerminalKind::kQuadratic),
                   pm({{-0.3}, {0.4}, {1.1}}, {0.5, 0.3, 0.2}), 2});
  }
  {
    ProblemSpec s;
    s.kind = "u_plus_v";
    s.u_grid = grid1({-1, 0, 1});
    s.v_grid = grid1({-1, 0, 1});
    s.terminal.kind = TerminalKind::kCustomTable;
    s.terminal.table_x = {-2, -1, 0, 1, 2};
    s.terminal.table_y = {1, 0.2, 0.5, 0, 1.5};
    out.push_back({"table_g", build(s), pm({{-0.25}, {0.5}}, {0.5, 0.5}), 2});
  }
  {
    ProblemSpec s;
    s.kind = "affine";
    s.dim = 2;
    s.u_dim = s.v_dim = 1;
    s.a = {0.2, -0.5, 0.3, -0.1};
    s.b = {1.0, 0.0};
    s.c = {0.5, 1.0};
    s.u_grid = grid1({-1, 0, 1});
    s.v_grid = grid1({-1, 0, 1});
    s.terminal.kind = TerminalKind::kLinear;
    s.terminal.c = {1.0, -2.0};
    out.push_back({"planar_linear_g", build(s), pm({{0, 0}, {1, -1}, {-1, 0.5}}, {0.4, 0.4, 0.2}), 1});
  }
  {
    ProblemSpec s;
    s.kind = "u_plus_v";
    s.horizon = 2.0;
    s.u_grid = grid1({-1, 1});
    s.v_grid = grid1({-1, 1});
    s.terminal.offset = -0.5;
    out.push_back({"uv_long_horizon", build(s), pm({{-1.0}, {0.0}, {1.0}}, {0.25, 0.5, 0.25}), 2});
  }
  {
    ProblemSpec s;
    s.kind = "constant";
    s.drift = {0.3};
    s.u_grid = grid1({-1, 1});
    s.v_grid = grid1({-1, 1});
    out.push_back({"constant_drift", build(s), ParticleMeasure::dirac({-0.2}), 2});
  }
  {
    ProblemSpec s;
    s.kind = "affine";
    s.a = {-0.6};
    s.b = {0.8};
    s.c = {1.0};
    s.drift = {0.1};
    s.u_grid = grid1({-1, 0, 1});
    s.v_grid = grid1({-1, 0, 1});
    s.terminal.kind = TerminalKind::kQuadratic;
    out.push_back({"damped_u3v3", build(s), pm({{-0.5}, {0.8}}, {0.5, 0.5}), 2});
  }
  return out;
}

}  // namespace testing_support
