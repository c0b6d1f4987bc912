#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "asymgame/dynamics.hpp"
#include "asymgame/game_kernel.hpp"
#include "asymgame/measures.hpp"

namespace asymgame {

// Enumeration of Player II's step controls: sequence index s has base-|V|
// digits, stage 0 most significant. Prefix nodes of length k (k < n) are
// numbered consecutively after all shorter prefixes.
class SequenceSpace {
 public:
  SequenceSpace(int n_stages, int v_count);

  int n_stages() const { return n_; }
  int v_count() const { return v_; }
  std::size_t size() const { return pow_[n_]; }
  std::size_t prefix_nodes() const { return offset_[n_]; }
  std::size_t level_size(int k) const { return pow_[k]; }
  std::size_t node(int k, std::size_t prefix) const { return offset_[k] + prefix; }
  // Prefix of length k of sequence s.
  std::size_t prefix_of(std::size_t s, int k) const { return s / pow_[n_ - k]; }
  int digit(std::size_t s, int k) const {
    return static_cast<int>((s / pow_[n_ - 1 - k]) % static_cast<std::size_t>(v_));
  }
  StepControlSequence decode(std::size_t s) const;
  std::size_t encode(const StepControlSequence& seq) const;

 private:
  int n_, v_;
  std::vector<std::size_t> pow_, offset_;
};

// Player II's mixed strategy over step sequences (general points of the
// sequence simplex; no independence across stages).
struct MixedStrategyII {
  std::vector<StepControlSequence> support;
  std::vector<double> probs;

  // Validates probabilities, distinctness and common length.
  void validate(const SequenceSpace& space) const;
  std::vector<double> dense(const SequenceSpace& space) const;
  static MixedStrategyII from_dense(const SequenceSpace& space,
                                    const std::vector<double>& q);
  static MixedStrategyII pure(const StepControlSequence& seq);
};

// Player I's deterministic strategy with a one-stage delay: per atom, the
// u index chosen at stage k as a function of the observed v prefix of
// length k.
struct StrategyTreeI {
  int n_stages = 0;
  int v_count = 0;
  std::vector<std::vector<int>> decisions;  // [atom][prefix node]

  static StrategyTreeI constant(std::size_t atoms, const SequenceSpace& space, int u);
  StepControlSequence u_sequence(std::size_t atom, const SequenceSpace& space,
                                 std::size_t seq) const;
  // True iff every decision is independent of the observed history.
  bool history_blind(const SequenceSpace& space) const;
};

// Linear functional Q -> sum_s Q(s) coeffs[s] over the full enumeration.
struct Cut {
  std::vector<double> coeffs;
  int tag = 0;

  double operator()(const std::vector<double>& q) const;
};

double payoff(const ControlProblem& prob, const ParticleMeasure& mu0,
              const StrategyTreeI& strat_I, const MixedStrategyII& strat_II);

struct BestResponse {
  StrategyTreeI tree;
  double value = 0.0;
  std::vector<double> atom_values;
  // Some prefix had zero probability under Q; decisions there were made with
  // uniform conditioning and do not affect the payoff.
  bool zero_probability_prefix = false;
};

// Exact per-atom backward induction over the observed v history.
BestResponse best_response_I(const ControlProblem& prob, const ParticleMeasure& mu0,
                             const MixedStrategyII& q, int n_stages);
BestResponse best_response_I_dense(const ControlProblem& prob,
                                   const ParticleMeasure& mu0,
                                   const SequenceSpace& space,
                                   const std::vector<double>& q);

struct SolverOptions {
  double tol = 1e-7;
  int max_iter = 500;
  std::size_t max_sequences = 1'000'000;
  // Above this many sequences the master LP only carries priced-in columns.
  std::size_t column_generation_threshold = 10'000;
};

struct VnResult {
  double value = 0.0;  // best certified lower bound (attained by q_star)
  double upper = 0.0;  // final master value
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  MixedStrategyII q_star;
  std::vector<Cut> cuts;
  std::vector<double> master_values;    // per iteration
  std::vector<double> response_values;  // per iteration
  std::vector<std::vector<double>> queried;  // Q at which each cut was generated
};

// Cutting-plane computation of V_n: a master LP over Player II's sequence
// simplex bounded by the cuts of Player I's best responses.
VnResult solve_Vn(const ControlProblem& prob, const ParticleMeasure& mu0,
                  int n_stages, const SolverOptions& opts = {});

struct BruteForceGuards {
  std::size_t max_rows = 100'000;
  std::size_t max_cols = 1'000;
};

struct BruteForceResult {
  double value = 0.0;
  MatrixGameSolution certificate;
  std::size_t rows = 0, cols = 0;
  std::vector<std::size_t> trees_per_atom;
  DenseMatrix matrix;
};

// Enumerates every pure per-atom tree tuple and every sequence, then solves
// the resulting matrix game.
BruteForceResult brute_force_value(const ControlProblem& prob,
                                   const ParticleMeasure& mu0, int n_stages,
                                   const BruteForceGuards& guards = {});

// Decodes a combined brute-force row index into one tree per atom.
StrategyTreeI brute_force_tree(const ControlProblem& prob, const BruteForceResult& bf,
                               std::size_t atoms, const SequenceSpace& space,
                               std::size_t row);

struct DppReport {
  double lhs = 0.0;        // V_n(mu0) by brute force
  double rhs = 0.0;        // inf_P sup_v V_{n-1}(mu') (exact, cutting plane)
  double rhs_dyadic = 0.0; // same objective at the optimal mixes rounded to 1/64
  double difference = 0.0; // |lhs - rhs|
  double dyadic_slack = 0.0;  // rhs_dyadic - rhs, >= 0
  int iterations = 0;
  std::vector<std::vector<double>> first_stage_mix;  // per atom, over u_grid
  int dyadic_resolution = 64;
};

DppReport dpp_check(const ControlProblem& prob, const ParticleMeasure& mu0,
                    int n_stages, const BruteForceGuards& guards = {});

struct DomainPoint {
  double t;
  ParticleMeasure mu;
};

struct EkelandViolation {
  std::size_t index;
  int inequality;  // 1: F >= F* - eps d, 2: F* <= min F + eps
  double amount;
};

struct EkelandResult {
  std::size_t index = 0;
  std::vector<std::size_t> chain;  // visited indices, first to last
  std::vector<EkelandViolation> certificate;  // empty on success
};

EkelandResult ekeland_point(const std::vector<DomainPoint>& domain,
                            const std::function<double(double, const ParticleMeasure&)>& f,
                            double eps);

}  // namespace asymgame
