#include "asymgame/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>

#include "asymgame/csv.hpp"
#include "asymgame/errors.hpp"

namespace asymgame {
namespace {

// Marginals are moved onto a 1e-12 integer grid so flows pivot exactly.
constexpr std::int64_t kMassGrid = 1'000'000'000'000;
constexpr double kReducedCostTol = 1e-10;

std::vector<std::int64_t> to_grid(const std::vector<double>& w) {
  std::vector<std::int64_t> q(w.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    q[i] = std::llround(w[i] * static_cast<double>(kMassGrid));
    total += q[i];
  }
  // Push the rounding residue onto the heaviest atom (lowest index on ties).
  const auto heaviest = static_cast<std::size_t>(
      std::max_element(q.begin(), q.end()) - q.begin());
  q[heaviest] += kMassGrid - total;
  if (q[heaviest] < 0) throw InvalidState("mass grid rounding went negative");
  return q;
}

// Transportation simplex over an m x k cost matrix. Nodes 0..m-1 are rows,
// m..m+k-1 are columns; the basis is a spanning tree of m+k-1 cells.
class TransportSimplex {
 public:
  TransportSimplex(const std::vector<double>& cost, std::size_t m, std::size_t k,
                   std::vector<std::int64_t> supply,
                   std::vector<std::int64_t> demand)
      : cost_(cost), m_(m), k_(k), flow_(m * k, 0), basic_(m * k, false) {
    double cmax = 0.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    tol_ = kReducedCostTol * std::max(1.0, cmax);
    northwest_corner(std::move(supply), std::move(demand));
  }

  void solve() {
    const long max_iter = 200L * static_cast<long>((m_ + k_) * (m_ + k_)) + 1000;
    std::vector<double> u(m_), v(k_);
    for (long it = 0;; ++it) {
      if (it > max_iter) throw SolverFailure("transport simplex did not converge", it);
      potentials(u, v);
      std::size_t entering = m_ * k_;
      for (std::size_t c = 0; c < m_ * k_; ++c) {
        if (basic_[c]) continue;
        const double rc = cost_[c] - u[c / k_] - v[c % k_];
        if (rc < -tol_) {
          entering = c;
          break;
        }
      }
      if (entering == m_ * k_) return;
      pivot(entering);
    }
  }

  const std::vector<bool>& basis() const { return basic_; }

 private:
  void northwest_corner(std::vector<std::int64_t> s, std::vector<std::int64_t> d) {
    std::size_t i = 0, j = 0;
    while (i < m_ && j < k_) {
      const std::int64_t q = std::min(s[i], d[j]);
      flow_[i * k_ + j] = q;
      basic_[i * k_ + j] = true;
      s[i] -= q;
      d[j] -= q;
      if (i == m_ - 1) {
        ++j;
      } else if (j == k_ - 1) {
        ++i;
      } else if (s[i] == 0) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Tree adjacency: for each node, the basic cells touching it.
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(m_ + k_);
    for (std::size_t c = 0; c < m_ * k_; ++c) {
      if (!basic_[c]) continue;
      adj[c / k_].push_back(c);
      adj[m_ + c % k_].push_back(c);
    }
    return adj;
  }

  std::size_t other_end(std::size_t cell, std::size_t node) const {
    const std::size_t r = cell / k_, col = m_ + cell % k_;
    return node == r ? col : r;
  }

  void potentials(std::vector<double>& u, std::vector<double>& v) const {
    const auto adj = adjacency();
    std::vector<bool> seen(m_ + k_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    u[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t c : adj[node]) {
        const std::size_t nb = other_end(c, node);
        if (seen[nb]) continue;
        seen[nb] = true;
        if (nb < m_) {
          u[nb] = cost_[c] - v[c % k_];
        } else {
          v[nb - m_] = cost_[c] - u[c / k_];
        }
        stack.push_back(nb);
      }
    }
  }

  // Tree path (as cells) from node `from` to node `to`.
  std::vector<std::size_t> tree_path(std::size_t from, std::size_t to) const {
    const auto adj = adjacency();
    std::vector<std::size_t> parent_cell(m_ + k_, m_ * k_);
    std::vector<bool> seen(m_ + k_, false);
    std::vector<std::size_t> queue{from};
    seen[from] = true;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::size_t node = queue[h];
      if (node == to) break;
      for (std::size_t c : adj[node]) {
        const std::size_t nb = other_end(c, node);
        if (seen[nb]) continue;
        seen[nb] = true;
        parent_cell[nb] = c;
        queue.push_back(nb);
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t node = to; node != from;) {
      const std::size_t c = parent_cell[node];
      if (c == m_ * k_) throw InvalidState("transport basis is not a spanning tree");
      path.push_back(c);
      node = other_end(c, node);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  void pivot(std::size_t entering) {
    // Cycle: entering (i,j) [+], then the tree path from column j back to row
    // i, alternating -, +, -, ...
    const std::size_t row = entering / k_, col = m_ + entering % k_;
    const auto path = tree_path(col, row);
    std::size_t leaving = m_ * k_;
    std::int64_t theta = 0;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const std::size_t c = path[t];
      if (leaving == m_ * k_ || flow_[c] < theta ||
          (flow_[c] == theta && c < leaving)) {
        leaving = c;
        theta = flow_[c];
      }
    }
    flow_[entering] += theta;
    for (std::size_t t = 0; t < path.size(); ++t) {
      flow_[path[t]] += (t % 2 == 0) ? -theta : theta;
    }
    basic_[entering] = true;
    basic_[leaving] = false;
    flow_[leaving] = 0;
  }

  const std::vector<double>& cost_;
  std::size_t m_, k_;
  std::vector<std::int64_t> flow_;
  std::vector<bool> basic_;
  double tol_ = kReducedCostTol;
};

// Flows on a spanning-tree basis from real-valued marginals, by peeling leaves.
std::vector<std::vector<double>> tree_flows(const std::vector<bool>& basic,
                                            std::size_t m, std::size_t k,
                                            const std::vector<double>& supply,
                                            const std::vector<double>& demand) {
  std::vector<double> excess(m + k);
  std::copy(supply.begin(), supply.end(), excess.begin());
  std::copy(demand.begin(), demand.end(), excess.begin() + static_cast<long>(m));
  std::vector<std::vector<std::size_t>> adj(m + k);
  std::vector<int> degree(m + k, 0);
  for (std::size_t c = 0; c < m * k; ++c) {
    if (!basic[c]) continue;
    adj[c / k].push_back(c);
    adj[m + c % k].push_back(c);
    ++degree[c / k];
    ++degree[m + c % k];
  }
  std::vector<bool> used(m * k, false);
  std::vector<std::vector<double>> pi(m, std::vector<double>(k, 0.0));
  std::vector<std::size_t> leaves;
  for (std::size_t n = 0; n < m + k; ++n) {
    if (degree[n] == 1) leaves.push_back(n);
  }
  while (!leaves.empty()) {
    const std::size_t node = leaves.back();
    leaves.pop_back();
    if (degree[node] != 1) continue;
    std::size_t cell = m * k;
    for (std::size_t c : adj[node]) {
      if (!used[c]) cell = c;
    }
    used[cell] = true;
    const std::size_t r = cell / k, col = m + cell % k;
    const std::size_t other = node == r ? col : r;
    const double q = std::max(0.0, excess[node]);
    pi[r][cell % k] = q;
    excess[node] = 0.0;
    excess[other] -= q;
    --degree[node];
    if (--degree[other] == 1) leaves.push_back(other);
  }
  return pi;
}

}  // namespace

ProjectionField ProjectionField::zero(const ParticleMeasure& base) {
  return {base, std::vector<Point>(base.size(), Point(base.dim(), 0.0))};
}

ProjectionField ProjectionField::scaled(double c) const {
  ProjectionField out = *this;
  for (auto& p : out.vectors) {
    for (double& x : p) x *= c;
  }
  return out;
}

double coupling_cost(const ParticleMeasure& mu, const ParticleMeasure& nu,
                     const std::vector<std::vector<double>>& coupling) {
  double cost = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (coupling[i][j] != 0.0) {
        cost += coupling[i][j] * squared_distance(mu.point(i), nu.point(j));
      }
    }
  }
  return cost;
}

Wasserstein2Result wasserstein2(const ParticleMeasure& mu,
                                const ParticleMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    throw InvalidArgument("wasserstein2: dimension mismatch (" +
                          std::to_string(mu.dim()) + " vs " +
                          std::to_string(nu.dim()) + ")");
  }
  const std::size_t m = mu.size(), k = nu.size();
  std::vector<double> cost(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      cost[i * k + j] = squared_distance(mu.point(i), nu.point(j));
    }
  }
  TransportSimplex simplex(cost, m, k, to_grid(mu.weights()), to_grid(nu.weights()));
  simplex.solve();
  auto pi = tree_flows(simplex.basis(), m, k, mu.weights(), nu.weights());
  const double c = std::max(0.0, coupling_cost(mu, nu, pi));
  return {std::sqrt(c), TransportPlan{mu, nu, std::move(pi), c}};
}

TransportPlan reversed(const TransportPlan& plan) {
  const std::size_t m = plan.source.size(), k = plan.target.size();
  std::vector<std::vector<double>> t(k, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) t[j][i] = plan.coupling[i][j];
  }
  return {plan.target, plan.source, std::move(t), plan.cost};
}

ProjectionField barycentric_projection(const TransportPlan& plan) {
  const auto& src = plan.source;
  const auto& dst = plan.target;
  const int d = dst.dim();
  ProjectionField field = ProjectionField::zero(dst);
  for (std::size_t j = 0; j < dst.size(); ++j) {
    double column = 0.0;
    Point acc(d, 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double q = plan.coupling[i][j];
      if (q == 0.0) continue;
      column += q;
      for (int c = 0; c < d; ++c) acc[c] += q * (src.point(i)[c] - dst.point(j)[c]);
    }
    if (column <= 0.0) {
      throw InvalidState("barycentric projection: target atom " +
                         std::to_string(j) + " receives no mass");
    }
    for (int c = 0; c < d; ++c) field.vectors[j][c] = acc[c] / column;
  }
  return field;
}

double l2_norm(const ProjectionField& field) {
  double s = 0.0;
  for (std::size_t j = 0; j < field.vectors.size(); ++j) {
    double n2 = 0.0;
    for (double x : field.vectors[j]) n2 += x * x;
    s += field.base.weight(j) * n2;
  }
  return std::sqrt(s);
}

void write_plan_csv(std::ostream& out, const TransportPlan& plan) {
  out << "i,j,mass\n";
  for (std::size_t i = 0; i < plan.coupling.size(); ++i) {
    for (std::size_t j = 0; j < plan.coupling[i].size(); ++j) {
      if (plan.coupling[i][j] > 0.0) {
        out << i << ',' << j << ',' << format_real(plan.coupling[i][j]) << '\n';
      }
    }
  }
}

}  // namespace asymgame
