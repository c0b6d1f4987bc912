#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "asymgame/errors.hpp"
#include "asymgame/dynamics.hpp"
#include "support.hpp"

using namespace asymgame;
using testing_support::Gen;
using testing_support::grid1;

namespace {

ControlProblem scalar(const std::string& kind, std::vector<double> a, std::vector<double> drift,
                      double T = 1.0, TerminalKind g = TerminalKind::kQuadratic) {
  ProblemSpec s;
  s.kind = kind;
  s.a = std::move(a);
  s.drift = std::move(drift);
  s.horizon = T;
  s.u_grid = grid1({-1, 1});
  s.v_grid = grid1({-1, 1});
  s.terminal.kind = g;
  return build_problem(s);
}

StepControlSequence seq(std::vector<int> v) { return {std::move(v)}; }

double norm(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

}  // namespace

TEST_CASE("flow examples") {
  SUBCASE("frozen dynamics") {
    const auto p = testing_support::frozen(2, {{0.0}, {1.0}}, {{0.5}});
    CHECK(flow(p, {0.3, -2.0}, seq({1, 0, 1}), seq({0, 0, 0})) == Point{0.3, -2.0});
  }
  SUBCASE("constant velocity") {
    const auto p = scalar("constant", {}, {0.75}, 2.0);
    CHECK(flow(p, {1.0}, seq({0, 1}), seq({1, 0}))[0] == doctest::Approx(2.5).epsilon(1e-14));
  }
  SUBCASE("exponential decay") {
    const auto p = scalar("linear", {-1.0}, {});
    CHECK(std::abs(flow(p, {1.0}, seq({0}), seq({0}))[0] - std::exp(-1.0)) <= 1e-6);
    CHECK(std::abs(flow(p, {1.0}, seq({0, 1, 0, 1}), seq({1, 1, 0, 0}))[0] - std::exp(-1.0)) <= 1e-6);
  }
  SUBCASE("non-finite state reports the stage") {
    const auto p = scalar("linear", {1e4}, {}, 4.0);
    try {
      flow(p, {1.0}, seq({0, 0, 0, 0}), seq({0, 0, 0, 0}));
      FAIL("expected NumericFailure");
    } catch (const NumericFailure& e) {
      CHECK(e.stage() >= 0);
      CHECK(e.stage() < 4);
    }
  }
  SUBCASE("mismatched sequences") {
    const auto p = scalar("linear", {-1.0}, {});
    CHECK_THROWS_AS(flow(p, {1.0}, seq({0}), seq({0, 1})), InvalidArgument);
    CHECK_THROWS_AS(flow(p, {1.0}, seq({2}), seq({0})), InvalidArgument);
    CHECK_THROWS_AS(flow(p, {1.0, 2.0}, seq({0}), seq({0})), InvalidArgument);
  }
}

TEST_CASE("closed forms of the built-in systems") {
  SUBCASE("u plus v is exact piecewise translation") {
    const auto p = testing_support::u_plus_v(grid1({-1, 0.5}), grid1({-1, 2}), 3.0);
    // tau = 1: (0.5 + 2) + (-1 - 1) + (0.5 - 1)
    CHECK(flow(p, {0.25}, seq({1, 0, 1}), seq({1, 0, 0}))[0] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("rotation with inert controls") {
    ProblemSpec s;
    s.kind = "rotation";
    s.dim = s.u_dim = s.v_dim = 2;
    s.omega = 1.3;
    s.horizon = 2.0;
    s.u_grid = {{0.0, 0.0}};
    s.v_grid = {{0.0, 0.0}};
    const auto p = build_problem(s);
    const auto x = flow(p, {1.0, 0.0}, seq({0, 0}), seq({0, 0}));
    CHECK(std::abs(x[0] - std::cos(2.6)) <= 1e-6);
    CHECK(std::abs(x[1] - std::sin(2.6)) <= 1e-6);
    CHECK(p.lip_f_x == doctest::Approx(1.3).epsilon(1e-12));
  }
  SUBCASE("scalar affine with constant controls") {
    // x' = a x + k  =>  x(T) = (x0 + k/a) e^{aT} - k/a
    ProblemSpec s;
    s.kind = "affine";
    s.a = {0.7};
    s.b = {2.0};
    s.c = {-1.0};
    s.drift = {0.1};
    s.horizon = 1.5;
    s.u_grid = grid1({0.5});
    s.v_grid = grid1({0.25});
    const auto p = build_problem(s);
    const double k = 0.1 + 2.0 * 0.5 - 0.25, a = 0.7, x0 = -0.4;
    const double expected = (x0 + k / a) * std::exp(a * 1.5) - k / a;
    CHECK(std::abs(flow(p, {x0}, seq({0, 0, 0}), seq({0, 0, 0}))[0] - expected) <= 1e-6);
  }
  SUBCASE("pursuit is u-v difference") {
    ProblemSpec s;
    s.kind = "pursuit";
    s.dim = s.u_dim = s.v_dim = 2;
    s.u_grid = {{1.0, 0.0}};
    s.v_grid = {{0.0, 1.0}};
    const auto p = build_problem(s);
    const auto x = flow(p, {0.0, 0.0}, seq({0}), seq({0}));
    CHECK(x[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("problem library validation") {
  ProblemSpec s;
  s.kind = "nope";
  s.u_grid = grid1({0});
  s.v_grid = grid1({0});
  CHECK_THROWS_AS(build_problem(s), InvalidArgument);
  s.kind = "affine";
  CHECK_THROWS_AS(build_problem(s), InvalidArgument);
  s.kind = "u_plus_v";
  s.dim = 2;
  CHECK_THROWS_AS(build_problem(s), InvalidArgument);
  s.dim = 1;
  s.u_grid = {{0.0, 1.0}};
  CHECK_THROWS_AS(build_problem(s), InvalidArgument);
  s.u_grid = grid1({0});
  s.terminal.kind = TerminalKind::kCustomTable;
  s.terminal.table_x = {0.0, 0.0};
  s.terminal.table_y = {1.0, 2.0};
  CHECK_THROWS_AS(build_problem(s), InvalidArgument);
  CHECK_THROWS_AS(parse_terminal_kind("cubic"), InvalidArgument);

  auto p = testing_support::u_plus_v(grid1({0}), grid1({0}));
  p.horizon = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  CHECK_THROWS_AS(testing_support::u_plus_v(grid1({0}), {}), InvalidArgument);
}

TEST_CASE("terminal costs") {
  ProblemSpec s;
  s.kind = "u_plus_v";
  s.u_grid = grid1({0});
  s.v_grid = grid1({0});
  s.terminal.kind = TerminalKind::kCustomTable;
  s.terminal.table_x = {-1.0, 0.0, 2.0};
  s.terminal.table_y = {3.0, 1.0, 2.0};
  s.terminal.scale = 2.0;
  s.terminal.offset = -1.0;
  const auto p = build_problem(s);
  const auto g = [&](double x) { return p.g(Point{x}); };
  CHECK(g(-5.0) == 5.0);
  CHECK(g(-0.5) == doctest::Approx(3.0));
  CHECK(g(1.0) == doctest::Approx(2.0));
  CHECK(g(9.0) == 3.0);
  CHECK(p.lip_g == doctest::Approx(4.0));
}

TEST_CASE("payoff_open_loop") {
  SUBCASE("constant terminal payoff") {
    ProblemSpec s;
    s.kind = "u_plus_v";
    s.u_grid = grid1({-1, 1});
    s.v_grid = grid1({-1, 1});
    s.terminal.kind = TerminalKind::kQuadratic;
    s.terminal.scale = 0.0;
    s.terminal.offset = 5.0;
    const auto p = build_problem(s);
    Gen gen(21);
    CHECK(payoff_open_loop(p, gen.measure(4, 1), seq({1, 0}), seq({0, 0})) == 5.0);
  }
  SUBCASE("frozen dynamics") {
    const auto p = testing_support::frozen(2, {{0.0}}, {{0.0}});
    Gen gen(22);
    const auto mu = gen.measure(5, 2);
    CHECK(payoff_open_loop(p, mu, seq({0}), seq({0})) ==
          doctest::Approx(second_moment(mu)).epsilon(1e-14));
  }
  SUBCASE("cancelling controls") {
    const auto p = testing_support::u_plus_v(grid1({-1, 1}), grid1({-1, 1}), 1.0, TerminalKind::kQuadratic);
    CHECK(payoff_open_loop(p, ParticleMeasure::dirac({0.0}), seq({1, 1, 1}), seq({0, 0, 0})) == 0.0);
  }
}

TEST_CASE("stage_pushforward") {
  SUBCASE("frozen dynamics") {
    const auto p = testing_support::frozen(1, grid1({0, 1}), grid1({0}));
    const ParticleMeasure mu({{0.0}, {1.0}}, {0.5, 0.5});
    CHECK(stage_pushforward(p, mu, {0, 1}, 0, 0.5) == mu);
  }
  SUBCASE("single atom agrees with flow") {
    const auto p = scalar("linear", {0.3}, {0.1});
    const auto mu = ParticleMeasure::dirac({0.4});
    const auto out = stage_pushforward(p, mu, {1}, 0, p.horizon);
    CHECK(out.point(0) == flow(p, {0.4}, seq({1}), seq({0})));
  }
  SUBCASE("per-atom translation under f = u") {
    ProblemSpec s;
    s.kind = "affine";
    s.a = {0.0};
    s.b = {1.0};
    s.c = {0.0};
    s.u_grid = grid1({-1, 2});
    s.v_grid = grid1({0});
    const auto p = build_problem(s);
    const ParticleMeasure mu({{0.0}, {1.0}}, {0.25, 0.75});
    const auto out = stage_pushforward(p, mu, {0, 1}, 0, 0.5);
    CHECK(out.point(0)[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(out.point(1)[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(out.weights() == mu.weights());
  }
  SUBCASE("commutes with pushforward of the flow map") {
    Gen gen(23);
    for (int t = 0; t < 20; ++t) {
      const auto p = testing_support::random_scalar_affine(gen, 3, 2, 1.0, TerminalKind::kAbs);
      const auto mu = gen.measure(gen.integer(1, 5), 1);
      const int u = gen.integer(0, 2), v = gen.integer(0, 1);
      const auto a = stage_pushforward(p, mu, std::vector<int>(mu.size(), u), v, p.horizon);
      const auto b = pushforward(mu, [&](const Point& x) { return flow(p, x, seq({u}), seq({v})); });
      CHECK(a == b);
    }
  }
  SUBCASE("bad indices") {
    const auto p = testing_support::frozen(1, grid1({0, 1}), grid1({0}));
    const auto mu = ParticleMeasure::dirac({0.0});
    CHECK_THROWS_AS(stage_pushforward(p, mu, {0, 1}, 0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(stage_pushforward(p, mu, {2}, 0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(stage_pushforward(p, mu, {0}, 1, 1.0), InvalidArgument);
  }
}

TEST_CASE("flow is Lipschitz in the initial state") {
  Gen gen(24);
  for (int t = 0; t < 100; ++t) {
    ProblemSpec s;
    s.kind = "affine";
    s.dim = 2;
    s.u_dim = s.v_dim = 1;
    for (int i = 0; i < 4; ++i) s.a.push_back(gen.real(-1, 1));
    s.b = {gen.real(-1, 1), gen.real(-1, 1)};
    s.c = {gen.real(-1, 1), gen.real(-1, 1)};
    s.horizon = gen.real(0.2, 2.0);
    s.u_grid = grid1({-1, 1});
    s.v_grid = grid1({-1, 1});
    const auto p = build_problem(s);
    const auto x = gen.point(2), y = gen.point(2);
    const int n = gen.integer(1, 4);
    StepControlSequence us, vs;
    for (int k = 0; k < n; ++k) {
      us.values.push_back(gen.integer(0, 1));
      vs.values.push_back(gen.integer(0, 1));
    }
    const double lhs = norm(flow(p, x, us, vs), flow(p, y, us, vs));
    CHECK(lhs <= 1.05 * std::exp(p.lip_f_x * p.horizon) * norm(x, y));
  }
}

TEST_CASE("bound_f dominates sampled velocities") {
  Gen gen(25);
  ProblemSpec s;
  s.kind = "rotation";
  s.dim = s.u_dim = s.v_dim = 2;
  s.omega = 0.8;
  s.u_grid = {{1.0, 0.0}, {0.0, -1.0}};
  s.v_grid = {{0.5, 0.5}};
  s.domain_radius = 3.0;
  const auto p = build_problem(s);
  for (int t = 0; t < 200; ++t) {
    Point x = gen.point(2, 3.0 / std::sqrt(2.0));
    Point dx(2);
    p.f(x, p.u_grid[gen.integer(0, 1)], p.v_grid[0], dx);
    CHECK(std::hypot(dx[0], dx[1]) <= p.bound_f + 1e-12);
  }
}
