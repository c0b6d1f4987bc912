#include "asymgame/kernels.hpp"

#include <cmath>
#include <limits>

#include "asymgame/errors.hpp"

namespace asymgame::kernels {
namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Walks the sequence tree below (k, prefix) from state x, following the u
// decisions of one atom, and writes g at every leaf.
void leaves_under(const ControlProblem& prob, const std::vector<int>& decisions,
                  const SequenceSpace& space, int k, std::size_t prefix,
                  const Point& x, double tau, double* out) {
  const int n = space.n_stages(), nv = space.v_count();
  const int u = decisions[space.node(k, prefix)];
  Point y(x.size());
  for (int v = 0; v < nv; ++v) {
    y = x;
    advance_stage(prob, y, prob.u_grid[u], prob.v_grid[v], tau);
    for (double c : y) {
      if (!std::isfinite(c)) throw NumericFailure("non-finite state", k);
    }
    const std::size_t child = prefix * nv + v;
    if (k + 1 == n) {
      out[child] = prob.g(y);
    } else {
      leaves_under(prob, decisions, space, k + 1, child, y, tau, out);
    }
  }
}

}  // namespace

std::vector<double> cut_coefficients_serial(const ControlProblem& prob,
                                            const ParticleMeasure& mu0,
                                            const StrategyTreeI& tree,
                                            const SequenceSpace& space) {
  const std::size_t n_seq = space.size();
  std::vector<double> c(n_seq, 0.0);
  for (std::size_t s = 0; s < n_seq; ++s) {
    const StepControlSequence v_seq = space.decode(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu0.size(); ++i) {
      const auto u_seq = tree.u_sequence(i, space, s);
      acc += mu0.weight(i) * prob.g(flow(prob, mu0.point(i), u_seq, v_seq));
    }
    c[s] = acc;
  }
  return c;
}

std::vector<double> cut_coefficients_parallel(const ControlProblem& prob,
                                              const ParticleMeasure& mu0,
                                              const StrategyTreeI& tree,
                                              const SequenceSpace& space) {
  const std::size_t n_seq = space.size();
  const std::size_t atoms = mu0.size();
  const double tau = prob.horizon / space.n_stages();
  std::vector<double> leaves(atoms * n_seq);
  const long long jobs = static_cast<long long>(atoms);
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < jobs; ++i) {
    try {
      leaves_under(prob, tree.decisions[i], space, 0, 0, mu0.point(i), tau,
                   leaves.data() + i * n_seq);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        failure = e.what();
      }
    }
  }
  if (failed) throw NumericFailure(failure, -1);
  std::vector<double> c(n_seq, 0.0);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < static_cast<long long>(n_seq); ++s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) acc += mu0.weight(i) * leaves[i * n_seq + s];
    c[s] = acc;
  }
  return c;
}

std::vector<std::vector<double>> prefix_masses(const SequenceSpace& space,
                                               const std::vector<double>& q) {
  const int n = space.n_stages(), nv = space.v_count();
  std::vector<std::vector<double>> mass(n + 1);
  mass[n] = q;
  for (int k = n - 1; k >= 0; --k) {
    mass[k].assign(space.level_size(k), 0.0);
    for (std::size_t h = 0; h < mass[k].size(); ++h) {
      double s = 0.0;
      for (int v = 0; v < nv; ++v) s += mass[k + 1][h * nv + v];
      mass[k][h] = s;
    }
  }
  return mass;
}

namespace {

struct Induction {
  const ControlProblem& prob;
  const SequenceSpace& space;
  const std::vector<std::vector<double>>& mass;
  double tau;
  bool flagged = false;

  // Conditional law of the next v given the prefix; uniform on null prefixes.
  double conditional(int k, std::size_t h, int v) const {
    const double m = mass[k][h];
    if (m <= 0.0) return 1.0 / space.v_count();
    return mass[k + 1][h * space.v_count() + v] / m;
  }

  // Minimal conditional expected terminal cost below (k, h) from state x.
  double evaluate(int k, std::size_t h, const Point& x, int* best_u) const {
    const int nu = static_cast<int>(prob.u_grid.size());
    const int nv = space.v_count();
    const int n = space.n_stages();
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    Point y(x.size());
    for (int u = 0; u < nu; ++u) {
      // Anchored at the first reachable child, so the sum is exact when all
      // continuation values agree even if the conditionals miss 1 by an ulp.
      double anchor = 0.0, acc = 0.0;
      bool anchored = false;
      for (int v = 0; v < nv; ++v) {
        const double p = conditional(k, h, v);
        if (p == 0.0) continue;
        y = x;
        advance_stage(prob, y, prob.u_grid[u], prob.v_grid[v], tau);
        for (double c : y) {
          if (!std::isfinite(c)) throw NumericFailure("non-finite state", k);
        }
        const double val = (k + 1 == n) ? prob.g(y)
                                        : evaluate(k + 1, h * nv + v, y, nullptr);
        if (!anchored) {
          anchor = val;
          anchored = true;
        }
        acc += p * (val - anchor);
      }
      acc += anchor;
      if (acc < best) {
        best = acc;
        arg = u;
      }
    }
    if (best_u) *best_u = arg;
    return best;
  }

  // Fixes the decisions along the reachable states; returns the node value.
  double record(int k, std::size_t h, const Point& x, std::vector<int>& decisions) {
    if (mass[k][h] <= 0.0) flagged = true;
    int u = 0;
    const double value = evaluate(k, h, x, &u);
    decisions[space.node(k, h)] = u;
    if (k + 1 == space.n_stages()) return value;
    Point y(x.size());
    for (int v = 0; v < space.v_count(); ++v) {
      y = x;
      advance_stage(prob, y, prob.u_grid[u], prob.v_grid[v], tau);
      record(k + 1, h * space.v_count() + v, y, decisions);
    }
    return value;
  }
};

}  // namespace

AtomResponse atom_best_response(const ControlProblem& prob, const Point& x0,
                                const SequenceSpace& space,
                                const std::vector<std::vector<double>>& prefix_mass) {
  Induction ind{prob, space, prefix_mass, prob.horizon / space.n_stages()};
  AtomResponse r;
  r.decisions.assign(space.prefix_nodes(), 0);
  r.value = ind.record(0, 0, x0, r.decisions);
  r.zero_probability_prefix = ind.flagged;
  return r;
}

std::vector<AtomResponse> best_responses_serial(const ControlProblem& prob,
                                                const ParticleMeasure& mu0,
                                                const SequenceSpace& space,
                                                const std::vector<double>& q) {
  const auto mass = prefix_masses(space, q);
  std::vector<AtomResponse> out;
  out.reserve(mu0.size());
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    out.push_back(atom_best_response(prob, mu0.point(i), space, mass));
  }
  return out;
}

std::vector<AtomResponse> best_responses_parallel(const ControlProblem& prob,
                                                  const ParticleMeasure& mu0,
                                                  const SequenceSpace& space,
                                                  const std::vector<double>& q) {
  const auto mass = prefix_masses(space, q);
  std::vector<AtomResponse> out(mu0.size());
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(mu0.size()); ++i) {
    try {
      out[i] = atom_best_response(prob, mu0.point(i), space, mass);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        failure = e.what();
      }
    }
  }
  if (failed) throw NumericFailure(failure, -1);
  return out;
}

std::vector<int> decode_tree(std::size_t index, std::size_t nodes, int u_count) {
  std::vector<int> d(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    d[k] = static_cast<int>(index % static_cast<std::size_t>(u_count));
    index /= static_cast<std::size_t>(u_count);
  }
  return d;
}

DenseMatrix atom_tree_payoffs_serial(const ControlProblem& prob, const Point& x0,
                                     const SequenceSpace& space) {
  const int nu = static_cast<int>(prob.u_grid.size());
  const std::size_t nodes = space.prefix_nodes();
  const std::size_t trees = ipow(static_cast<std::size_t>(nu), nodes);
  DenseMatrix table(trees, space.size());
  StrategyTreeI tree{space.n_stages(), space.v_count(), {{}}};
  for (std::size_t t = 0; t < trees; ++t) {
    tree.decisions[0] = decode_tree(t, nodes, nu);
    for (std::size_t s = 0; s < space.size(); ++s) {
      table(t, s) = prob.g(flow(prob, x0, tree.u_sequence(0, space, s), space.decode(s)));
    }
  }
  return table;
}

DenseMatrix atom_tree_payoffs_parallel(const ControlProblem& prob, const Point& x0,
                                       const SequenceSpace& space) {
  const int nu = static_cast<int>(prob.u_grid.size());
  const std::size_t nodes = space.prefix_nodes();
  const std::size_t trees = ipow(static_cast<std::size_t>(nu), nodes);
  const double tau = prob.horizon / space.n_stages();
  DenseMatrix table(trees, space.size());
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (long long t = 0; t < static_cast<long long>(trees); ++t) {
    try {
      const auto d = decode_tree(static_cast<std::size_t>(t), nodes, nu);
      leaves_under(prob, d, space, 0, 0, x0, tau, table.row(static_cast<std::size_t>(t)));
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        failure = e.what();
      }
    }
  }
  if (failed) throw NumericFailure(failure, -1);
  return table;
}

}  // namespace asymgame::kernels
