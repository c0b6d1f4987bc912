#pragma once

#include <iosfwd>
#include <vector>

#include "asymgame/measures.hpp"

namespace asymgame {

// Coupling between `source` (rows) and `target` (columns), stored densely.
struct TransportPlan {
  ParticleMeasure source;
  ParticleMeasure target;
  std::vector<std::vector<double>> coupling;
  double cost = 0.0;  // sum_ij pi_ij |x_i - y_j|^2

  double mass(std::size_t i, std::size_t j) const { return coupling[i][j]; }
};

// Vector field carried by `base`: one displacement per atom.
struct ProjectionField {
  ParticleMeasure base;
  std::vector<Point> vectors;

  static ProjectionField zero(const ParticleMeasure& base);
  ProjectionField scaled(double c) const;
};

struct Wasserstein2Result {
  double distance;
  TransportPlan plan;
};

// Exact quadratic-cost transport by transportation simplex on the bipartite
// basis tree. Entering and leaving cells follow Bland's lowest-index rule, so
// degenerate instances return the same canonical plan on every run.
Wasserstein2Result wasserstein2(const ParticleMeasure& mu,
                                const ParticleMeasure& nu);

// Cost of an arbitrary coupling matrix between the two measures.
double coupling_cost(const ParticleMeasure& mu, const ParticleMeasure& nu,
                     const std::vector<std::vector<double>>& coupling);

// The plan with source and target exchanged.
TransportPlan reversed(const TransportPlan& plan);

// Field on plan.target: p(y_j) = sum_i pi_ij (x_i - y_j) / sum_i pi_ij.
ProjectionField barycentric_projection(const TransportPlan& plan);

double l2_norm(const ProjectionField& field);

// CSV triples "i,j,mass" for the nonzero entries in row-major order.
void write_plan_csv(std::ostream& out, const TransportPlan& plan);

}  // namespace asymgame
