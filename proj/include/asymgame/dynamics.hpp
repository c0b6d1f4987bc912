#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "asymgame/measures.hpp"

namespace asymgame {

// dx = f(x, u, v), written into the output span.
using DynamicsFn = std::function<void(std::span<const double> x,
                                      std::span<const double> u,
                                      std::span<const double> v,
                                      std::span<double> dx)>;
using TerminalCostFn = std::function<double(std::span<const double> x)>;

// Controlled ODE with terminal payoff, gridded controls and the Lipschitz
// metadata that property tests check against. Player I (u) minimizes.
struct ControlProblem {
  int dim = 1;
  DynamicsFn f;
  TerminalCostFn g;
  double horizon = 1.0;
  std::vector<Point> u_grid;
  std::vector<Point> v_grid;
  double lip_f_x = 0.0;
  double lip_g = 0.0;
  double bound_f = 0.0;
  int substeps = 16;  // RK4 substeps per stage
  std::string label;

  // Throws InvalidArgument if grids are empty, T <= 0, or pieces are missing.
  void validate() const;
  // Same problem on a shorter horizon (used for continuation games).
  ControlProblem with_horizon(double t) const;
  ControlProblem with_v_grid(std::vector<Point> grid) const;
};

// A step control: one grid index per stage.
struct StepControlSequence {
  std::vector<int> values;

  int n_stages() const { return static_cast<int>(values.size()); }
  friend bool operator==(const StepControlSequence&, const StepControlSequence&) = default;
  friend auto operator<=>(const StepControlSequence&, const StepControlSequence&) = default;
};

// Advances x in place over one stage with constant controls (RK4, substeps).
void advance_stage(const ControlProblem& prob, std::span<double> x,
                   const Point& u, const Point& v, double stage_len);

// Endpoint X_T from x0 under step controls; stage length T/n.
Point flow(const ControlProblem& prob, const Point& x0,
           const StepControlSequence& u_seq, const StepControlSequence& v_seq);

double payoff_open_loop(const ControlProblem& prob, const ParticleMeasure& mu0,
                        const StepControlSequence& u_seq,
                        const StepControlSequence& v_seq);

// Each atom advanced one stage under its own u index and the shared v index.
ParticleMeasure stage_pushforward(const ControlProblem& prob,
                                  const ParticleMeasure& mu,
                                  const std::vector<int>& u_assignment,
                                  int v_index, double stage_len);

// ---------------------------------------------------------------------------
// Problem library. Every built-in kind is an affine system
//   f(x,u,v) = A x + B u + C v + c
// so closed forms and Lipschitz constants are available.

enum class TerminalKind { kAbs, kQuadratic, kLinear, kCustomTable };

struct TerminalSpec {
  TerminalKind kind = TerminalKind::kAbs;
  double scale = 1.0;
  double offset = 0.0;
  std::vector<double> c;        // linear coefficients
  std::vector<double> table_x;  // custom-table knots (d = 1), increasing
  std::vector<double> table_y;
};

struct ProblemSpec {
  std::string label = "problem";
  std::string kind = "affine";  // zero, constant, linear, u_plus_v, rotation, pursuit, affine
  int dim = 1;
  int u_dim = 1;
  int v_dim = 1;
  std::vector<double> a;  // dim x dim, row-major
  std::vector<double> b;  // dim x u_dim
  std::vector<double> c;  // dim x v_dim
  std::vector<double> drift;  // dim
  double omega = 1.0;
  double horizon = 1.0;
  std::vector<Point> u_grid;
  std::vector<Point> v_grid;
  double domain_radius = 10.0;
  int substeps = 16;
  TerminalSpec terminal;
};

// Fills kind-specific matrices (dims must already be set) and builds the
// problem. Throws InvalidArgument on shape errors or unknown kinds.
ControlProblem build_problem(ProblemSpec spec);

TerminalKind parse_terminal_kind(const std::string& s);
double spectral_norm(const std::vector<double>& m, int rows, int cols);

}  // namespace asymgame
