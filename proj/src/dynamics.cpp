#include "asymgame/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "asymgame/errors.hpp"

namespace asymgame {

void ControlProblem::validate() const {
  if (dim < 1) throw InvalidArgument("problem dimension must be >= 1");
  if (!f || !g) throw InvalidArgument("problem needs both f and g");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon T must be > 0");
  if (u_grid.empty() || v_grid.empty()) throw InvalidArgument("control grids must be nonempty");
  if (substeps < 1) throw InvalidArgument("integrator.substeps must be >= 1");
}

ControlProblem ControlProblem::with_horizon(double t) const {
  ControlProblem p = *this;
  p.horizon = t;
  return p;
}

ControlProblem ControlProblem::with_v_grid(std::vector<Point> grid) const {
  ControlProblem p = *this;
  p.v_grid = std::move(grid);
  return p;
}

void advance_stage(const ControlProblem& prob, std::span<double> x,
                   const Point& u, const Point& v, double stage_len) {
  const std::size_t d = x.size();
  const double h = stage_len / prob.substeps;
  // Stack buffers for the common low-dimensional case.
  double buf[6 * 8];
  std::vector<double> heap;
  double* base = buf;
  if (d > 8) {
    heap.resize(6 * d);
    base = heap.data();
  }
  std::span<double> k1(base, d), k2(base + d, d), k3(base + 2 * d, d),
      k4(base + 3 * d, d), tmp(base + 4 * d, d);
  for (int s = 0; s < prob.substeps; ++s) {
    prob.f(x, u, v, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    prob.f(tmp, u, v, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    prob.f(tmp, u, v, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
    prob.f(tmp, u, v, k4);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
}

namespace {

void check_finite(std::span<const double> x, int stage) {
  for (double c : x) {
    if (!std::isfinite(c)) throw NumericFailure("non-finite state", stage);
  }
}

}  // namespace

Point flow(const ControlProblem& prob, const Point& x0,
           const StepControlSequence& u_seq, const StepControlSequence& v_seq) {
  const int n = u_seq.n_stages();
  if (n < 1 || v_seq.n_stages() != n) {
    throw InvalidArgument("flow: control sequences must have equal, positive length");
  }
  if (static_cast<int>(x0.size()) != prob.dim) throw InvalidArgument("flow: state dimension mismatch");
  const double tau = prob.horizon / n;
  Point x = x0;
  for (int k = 0; k < n; ++k) {
    const int ui = u_seq.values[k], vi = v_seq.values[k];
    if (ui < 0 || ui >= static_cast<int>(prob.u_grid.size()) || vi < 0 ||
        vi >= static_cast<int>(prob.v_grid.size())) {
      throw InvalidArgument("flow: control index out of range at stage " + std::to_string(k));
    }
    advance_stage(prob, x, prob.u_grid[ui], prob.v_grid[vi], tau);
    check_finite(x, k);
  }
  return x;
}

double payoff_open_loop(const ControlProblem& prob, const ParticleMeasure& mu0,
                        const StepControlSequence& u_seq,
                        const StepControlSequence& v_seq) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    total += mu0.weight(i) * prob.g(flow(prob, mu0.point(i), u_seq, v_seq));
  }
  return total;
}

ParticleMeasure stage_pushforward(const ControlProblem& prob,
                                  const ParticleMeasure& mu,
                                  const std::vector<int>& u_assignment,
                                  int v_index, double stage_len) {
  if (u_assignment.size() != mu.size()) {
    throw InvalidArgument("stage_pushforward: one u index per atom required");
  }
  if (v_index < 0 || v_index >= static_cast<int>(prob.v_grid.size())) {
    throw InvalidArgument("stage_pushforward: v index out of range");
  }
  std::vector<Point> pts = mu.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int ui = u_assignment[i];
    if (ui < 0 || ui >= static_cast<int>(prob.u_grid.size())) {
      throw InvalidArgument("stage_pushforward: u index out of range");
    }
    advance_stage(prob, pts[i], prob.u_grid[ui], prob.v_grid[v_index], stage_len);
    check_finite(pts[i], 0);
  }
  return ParticleMeasure(std::move(pts), mu.weights());
}

// ---------------------------------------------------------------------------

TerminalKind parse_terminal_kind(const std::string& s) {
  if (s == "abs") return TerminalKind::kAbs;
  if (s == "quadratic") return TerminalKind::kQuadratic;
  if (s == "linear") return TerminalKind::kLinear;
  if (s == "custom-table") return TerminalKind::kCustomTable;
  throw InvalidArgument("unknown g.kind '" + s +
                        "' (expected abs, quadratic, linear or custom-table)");
}

double spectral_norm(const std::vector<double>& m, int rows, int cols) {
  if (rows == 0 || cols == 0) return 0.0;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      mat(m.data(), rows, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  return svd.singularValues()(0);
}

namespace {

std::vector<double> identity(int d, double s = 1.0) {
  std::vector<double> m(static_cast<std::size_t>(d * d), 0.0);
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i * d + i)] = s;
  return m;
}

void require_size(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw InvalidArgument(std::string(what) + " has " + std::to_string(v.size()) +
                          " entries, expected " + std::to_string(n));
  }
}

void fill_kind_defaults(ProblemSpec& s) {
  const int d = s.dim;
  const auto zeros = [](int r, int c) {
    return std::vector<double>(static_cast<std::size_t>(r * c), 0.0);
  };
  if (s.kind == "zero") {
    s.a = zeros(d, d);
    s.b = zeros(d, s.u_dim);
    s.c = zeros(d, s.v_dim);
    s.drift.assign(d, 0.0);
  } else if (s.kind == "constant") {
    s.a = zeros(d, d);
    s.b = zeros(d, s.u_dim);
    s.c = zeros(d, s.v_dim);
    if (s.drift.empty()) throw InvalidArgument("kind 'constant' needs problem.drift");
  } else if (s.kind == "linear") {
    if (s.a.empty()) throw InvalidArgument("kind 'linear' needs problem.A");
    s.b = zeros(d, s.u_dim);
    s.c = zeros(d, s.v_dim);
  } else if (s.kind == "u_plus_v") {
    if (d != 1 || s.u_dim != 1 || s.v_dim != 1) {
      throw InvalidArgument("kind 'u_plus_v' is scalar: dim, u_dim, v_dim must be 1");
    }
    s.a = {0.0};
    s.b = {1.0};
    s.c = {1.0};
  } else if (s.kind == "rotation") {
    if (d != 2 || s.u_dim != 2 || s.v_dim != 2) {
      throw InvalidArgument("kind 'rotation' needs dim = u_dim = v_dim = 2");
    }
    s.a = {0.0, -s.omega, s.omega, 0.0};
    s.b = identity(2);
    s.c = identity(2);
  } else if (s.kind == "pursuit") {
    if (d != s.u_dim || d != s.v_dim) {
      throw InvalidArgument("kind 'pursuit' needs dim = u_dim = v_dim");
    }
    s.a = zeros(d, d);
    s.b = identity(d, -1.0);
    s.c = identity(d);
  } else if (s.kind == "affine") {
    if (s.a.empty() || s.b.empty() || s.c.empty()) {
      throw InvalidArgument("kind 'affine' needs problem.A, problem.B and problem.C");
    }
  } else {
    throw InvalidArgument("unknown problem.kind '" + s.kind + "'");
  }
  if (s.drift.empty()) s.drift.assign(d, 0.0);
}

}  // namespace

ControlProblem build_problem(ProblemSpec s) {
  if (s.dim < 1 || s.u_dim < 1 || s.v_dim < 1) {
    throw InvalidArgument("problem dimensions must be >= 1");
  }
  fill_kind_defaults(s);
  const int d = s.dim, du = s.u_dim, dv = s.v_dim;
  require_size(s.a, static_cast<std::size_t>(d * d), "problem.A");
  require_size(s.b, static_cast<std::size_t>(d * du), "problem.B");
  require_size(s.c, static_cast<std::size_t>(d * dv), "problem.C");
  require_size(s.drift, static_cast<std::size_t>(d), "problem.drift");
  for (const auto& u : s.u_grid) {
    if (static_cast<int>(u.size()) != du) throw InvalidArgument("u_grid point has wrong dimension");
  }
  for (const auto& v : s.v_grid) {
    if (static_cast<int>(v.size()) != dv) throw InvalidArgument("v_grid point has wrong dimension");
  }

  ControlProblem p;
  p.dim = d;
  p.label = s.label;
  p.horizon = s.horizon;
  p.u_grid = s.u_grid;
  p.v_grid = s.v_grid;
  p.substeps = s.substeps;
  p.f = [a = s.a, b = s.b, c = s.c, drift = s.drift, d, du, dv](
            std::span<const double> x, std::span<const double> u,
            std::span<const double> v, std::span<double> dx) {
    for (int i = 0; i < d; ++i) {
      double acc = drift[i];
      for (int j = 0; j < d; ++j) acc += a[i * d + j] * x[j];
      for (int j = 0; j < du; ++j) acc += b[i * du + j] * u[j];
      for (int j = 0; j < dv; ++j) acc += c[i * dv + j] * v[j];
      dx[i] = acc;
    }
  };
  p.lip_f_x = spectral_norm(s.a, d, d);
  double control_part = 0.0;
  for (const auto& u : s.u_grid) {
    for (const auto& v : s.v_grid) {
      double n2 = 0.0;
      for (int i = 0; i < d; ++i) {
        double acc = s.drift[i];
        for (int j = 0; j < du; ++j) acc += s.b[i * du + j] * u[j];
        for (int j = 0; j < dv; ++j) acc += s.c[i * dv + j] * v[j];
        n2 += acc * acc;
      }
      control_part = std::max(control_part, std::sqrt(n2));
    }
  }
  p.bound_f = p.lip_f_x * s.domain_radius + control_part;

  const TerminalSpec& g = s.terminal;
  switch (g.kind) {
    case TerminalKind::kAbs:
      p.g = [sc = g.scale, off = g.offset](std::span<const double> x) {
        double n2 = 0.0;
        for (double c : x) n2 += c * c;
        return sc * std::sqrt(n2) + off;
      };
      p.lip_g = std::abs(g.scale);
      break;
    case TerminalKind::kQuadratic:
      p.g = [sc = g.scale, off = g.offset](std::span<const double> x) {
        double n2 = 0.0;
        for (double c : x) n2 += c * c;
        return sc * n2 + off;
      };
      // Lipschitz only on the declared domain ball.
      p.lip_g = 2.0 * std::abs(g.scale) * s.domain_radius;
      break;
    case TerminalKind::kLinear: {
      std::vector<double> coef = g.c.empty() ? std::vector<double>(d, 0.0) : g.c;
      require_size(coef, static_cast<std::size_t>(d), "g.c");
      double n2 = 0.0;
      for (double c : coef) n2 += c * c;
      p.lip_g = std::abs(g.scale) * std::sqrt(n2);
      p.g = [coef, sc = g.scale, off = g.offset](std::span<const double> x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < coef.size(); ++i) acc += coef[i] * x[i];
        return sc * acc + off;
      };
      break;
    }
    case TerminalKind::kCustomTable: {
      if (d != 1) throw InvalidArgument("g.kind custom-table requires dim = 1");
      if (g.table_x.size() < 2 || g.table_x.size() != g.table_y.size()) {
        throw InvalidArgument("g.table_x and g.table_y need equal length >= 2");
      }
      double slope = 0.0;
      for (std::size_t i = 1; i < g.table_x.size(); ++i) {
        const double dx = g.table_x[i] - g.table_x[i - 1];
        if (!(dx > 0.0)) throw InvalidArgument("g.table_x must be strictly increasing");
        slope = std::max(slope, std::abs(g.table_y[i] - g.table_y[i - 1]) / dx);
      }
      p.lip_g = std::abs(g.scale) * slope;
      p.g = [tx = g.table_x, ty = g.table_y, sc = g.scale,
             off = g.offset](std::span<const double> x) {
        const double z = x[0];
        double y;
        if (z <= tx.front()) {
          y = ty.front();
        } else if (z >= tx.back()) {
          y = ty.back();
        } else {
          const auto it = std::upper_bound(tx.begin(), tx.end(), z);
          const std::size_t i = static_cast<std::size_t>(it - tx.begin());
          const double t = (z - tx[i - 1]) / (tx[i] - tx[i - 1]);
          y = ty[i - 1] + t * (ty[i] - ty[i - 1]);
        }
        return sc * y + off;
      };
      break;
    }
  }
  p.validate();
  return p;
}

}  // namespace asymgame
