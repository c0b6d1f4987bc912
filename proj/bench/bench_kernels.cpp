// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "asymgame/dynamics.hpp"
#include "asymgame/kernels.hpp"

using namespace asymgame;

namespace {

ControlProblem problem() {
  ProblemSpec s;
  s.kind = "rotation";
  s.dim = s.u_dim = s.v_dim = 2;
  s.omega = 0.7;
  s.u_grid = {{1, 0}, {0, 1}, {-1, 0}};
  s.v_grid = {{1, 0}, {0, 1}, {-1, -1}};
  s.terminal.kind = TerminalKind::kQuadratic;
  return build_problem(s);
}

ParticleMeasure cloud(int atoms) {
  std::vector<Point> pts;
  for (int i = 0; i < atoms; ++i) pts.push_back({0.1 * i, -0.05 * i});
  return ParticleMeasure::uniform(pts);
}

std::vector<double> uniform(const SequenceSpace& sp) {
  return std::vector<double>(sp.size(), 1.0 / static_cast<double>(sp.size()));
}

template <bool Parallel>
void BM_BestResponses(benchmark::State& state) {
  const auto p = problem();
  const auto mu = cloud(static_cast<int>(state.range(1)));
  const SequenceSpace sp(static_cast<int>(state.range(0)), 3);
  const auto q = uniform(sp);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(kernels::best_responses_parallel(p, mu, sp, q));
    } else {
      benchmark::DoNotOptimize(kernels::best_responses_serial(p, mu, sp, q));
    }
  }
}

template <bool Parallel>
void BM_CutCoefficients(benchmark::State& state) {
  const auto p = problem();
  const auto mu = cloud(static_cast<int>(state.range(1)));
  const SequenceSpace sp(static_cast<int>(state.range(0)), 3);
  StrategyTreeI tree = StrategyTreeI::constant(mu.size(), sp, 1);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(kernels::cut_coefficients_parallel(p, mu, tree, sp));
    } else {
      benchmark::DoNotOptimize(kernels::cut_coefficients_serial(p, mu, tree, sp));
    }
  }
}

template <bool Parallel>
void BM_TreePayoffs(benchmark::State& state) {
  const auto p = problem();
  const SequenceSpace sp(2, 3);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(kernels::atom_tree_payoffs_parallel(p, {0.3, -0.2}, sp));
    } else {
      benchmark::DoNotOptimize(kernels::atom_tree_payoffs_serial(p, {0.3, -0.2}, sp));
    }
  }
}

}  // namespace

BENCHMARK(BM_BestResponses<false>)->Args({3, 8})->Args({5, 8});
BENCHMARK(BM_BestResponses<true>)->Args({3, 8})->Args({5, 8});
BENCHMARK(BM_CutCoefficients<false>)->Args({4, 8})->Args({6, 8});
BENCHMARK(BM_CutCoefficients<true>)->Args({4, 8})->Args({6, 8});
BENCHMARK(BM_TreePayoffs<false>);
BENCHMARK(BM_TreePayoffs<true>);

BENCHMARK_MAIN();
