#pragma once

// Data-parallel inner loops of the value solver. Each kernel has a serial
// reference (straight per-sequence flow evaluation) and an OpenMP variant
// that shares stage prefixes across sequences. Both perform the same
// floating-point operations in the same order per output slot, so their
// results are bitwise identical.

#include <vector>

#include "asymgame/dynamics.hpp"
#include "asymgame/lp.hpp"
#include "asymgame/measures.hpp"
#include "asymgame/value_solver.hpp"

namespace asymgame::kernels {

// c[s] = sum_i w_i g(X_T(x_i; tree_i along s, s)) for every sequence s.
std::vector<double> cut_coefficients_serial(const ControlProblem& prob,
                                            const ParticleMeasure& mu0,
                                            const StrategyTreeI& tree,
                                            const SequenceSpace& space);
std::vector<double> cut_coefficients_parallel(const ControlProblem& prob,
                                              const ParticleMeasure& mu0,
                                              const StrategyTreeI& tree,
                                              const SequenceSpace& space);

struct AtomResponse {
  std::vector<int> decisions;
  double value = 0.0;
  bool zero_probability_prefix = false;
};

// Backward induction for a single atom against the dense Q.
AtomResponse atom_best_response(const ControlProblem& prob, const Point& x0,
                                const SequenceSpace& space,
                                const std::vector<std::vector<double>>& prefix_mass);

std::vector<std::vector<double>> prefix_masses(const SequenceSpace& space,
                                               const std::vector<double>& q);

std::vector<AtomResponse> best_responses_serial(const ControlProblem& prob,
                                                const ParticleMeasure& mu0,
                                                const SequenceSpace& space,
                                                const std::vector<double>& q);
std::vector<AtomResponse> best_responses_parallel(const ControlProblem& prob,
                                                  const ParticleMeasure& mu0,
                                                  const SequenceSpace& space,
                                                  const std::vector<double>& q);

// Decisions of pure tree number `index` for one atom: base-|U| digits over
// the prefix nodes, node 0 least significant.
std::vector<int> decode_tree(std::size_t index, std::size_t nodes, int u_count);

// table(t, s) = g(X_T(x0; tree t along s, s)) for every pure tree t.
DenseMatrix atom_tree_payoffs_serial(const ControlProblem& prob, const Point& x0,
                                     const SequenceSpace& space);
DenseMatrix atom_tree_payoffs_parallel(const ControlProblem& prob, const Point& x0,
                                       const SequenceSpace& space);

}  // namespace asymgame::kernels
