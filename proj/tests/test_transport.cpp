#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "asymgame/errors.hpp"
#include "asymgame/transport.hpp"
#include "support.hpp"

using namespace asymgame;
using testing_support::Gen;
using testing_support::permutation_w2;

namespace {

void check_plan(const TransportPlan& p) {
  for (std::size_t i = 0; i < p.source.size(); ++i) {
    double r = 0.0;
    for (double m : p.coupling[i]) {
      CHECK(m >= 0.0);
      r += m;
    }
    CHECK(std::abs(r - p.source.weight(i)) <= 1e-9);
  }
  for (std::size_t j = 0; j < p.target.size(); ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < p.source.size(); ++i) c += p.coupling[i][j];
    CHECK(std::abs(c - p.target.weight(j)) <= 1e-9);
  }
  CHECK(std::abs(coupling_cost(p.source, p.target, p.coupling) - p.cost) <= 1e-9);
}

}  // namespace

TEST_CASE("wasserstein2 examples") {
  SUBCASE("identical measures") {
    Gen gen(11);
    const auto mu = gen.measure(5, 2);
    CHECK(wasserstein2(mu, mu).distance <= 1e-12);
  }
  SUBCASE("Dirac to Dirac") {
    CHECK(wasserstein2(ParticleMeasure::dirac({0.0, 0.0}), ParticleMeasure::dirac({3.0, 4.0})).distance ==
          doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("shift of a two-point measure") {
    const ParticleMeasure a({{0.0}, {1.0}}, {0.5, 0.5});
    const ParticleMeasure b({{2.0}, {3.0}}, {0.5, 0.5});
    CHECK(wasserstein2(a, b).distance == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("Dirac against a spread measure uses the second moment") {
    Gen gen(12);
    for (int t = 0; t < 20; ++t) {
      const auto mu = gen.measure(gen.integer(1, 7), 3);
      CHECK(wasserstein2(ParticleMeasure::dirac({0.0, 0.0, 0.0}), mu).distance ==
            doctest::Approx(std::sqrt(second_moment(mu))).epsilon(1e-12));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(wasserstein2(ParticleMeasure::dirac({0.0}), ParticleMeasure::dirac({0.0, 1.0})),
                    InvalidArgument);
  }
}

TEST_CASE("wasserstein2 matches the permutation oracle") {
  Gen gen(13);
  for (int t = 0; t < 100; ++t) {
    const int n = gen.integer(1, 6), d = gen.integer(1, 3);
    const auto a = gen.uniform_measure(n, d), b = gen.uniform_measure(n, d, 2.0);
    const auto r = wasserstein2(a, b);
    CHECK(std::abs(r.distance - permutation_w2(a, b)) <= 1e-12);
    check_plan(r.plan);
  }
}

TEST_CASE("plans for unequal weights are feasible and symmetric in cost") {
  Gen gen(14);
  for (int t = 0; t < 100; ++t) {
    const int d = gen.integer(1, 3);
    const auto a = gen.measure(gen.integer(1, 9), d), b = gen.measure(gen.integer(1, 9), d);
    const auto ab = wasserstein2(a, b), ba = wasserstein2(b, a);
    check_plan(ab.plan);
    CHECK(std::abs(ab.distance - ba.distance) <= 1e-9);
    // Triangle inequality through a third measure.
    const auto c = gen.measure(gen.integer(1, 9), d);
    CHECK(ab.distance <= wasserstein2(a, c).distance + wasserstein2(c, b).distance + 1e-9);
  }
}

TEST_CASE("reversed plan is the transpose") {
  Gen gen(15);
  const auto a = gen.measure(4, 2), b = gen.measure(3, 2);
  const auto p = wasserstein2(a, b).plan;
  const auto r = reversed(p);
  REQUIRE(r.coupling.size() == 3);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.coupling[j][i] == p.coupling[i][j]);
  }
  CHECK(r.source == b);
}

TEST_CASE("barycentric projection") {
  SUBCASE("Dirac source gives x - y") {
    const auto src = ParticleMeasure::dirac({1.0, 1.0});
    const auto tgt = ParticleMeasure({{0.0, 0.0}, {2.0, 3.0}}, {0.25, 0.75});
    const auto p = barycentric_projection(wasserstein2(src, tgt).plan);
    CHECK(p.base == tgt);
    CHECK(p.vectors[0] == Point{1.0, 1.0});
    CHECK(p.vectors[1] == Point{-1.0, -2.0});
  }
  SUBCASE("split column mass is averaged") {
    TransportPlan plan{ParticleMeasure({{-1.0}, {1.0}}, {0.5, 0.5}), ParticleMeasure::dirac({0.0}),
                       {{0.5}, {0.5}}, 1.0};
    const auto p = barycentric_projection(plan);
    CHECK(p.vectors[0][0] == 0.0);
  }
  SUBCASE("zero column mass is rejected") {
    TransportPlan plan{ParticleMeasure::dirac({0.0}), ParticleMeasure({{1.0}, {2.0}}, {0.5, 0.5}),
                       {{1.0, 0.0}}, 1.0};
    CHECK_THROWS_AS(barycentric_projection(plan), InvalidState);
  }
  SUBCASE("norm of the projection is at most W2") {
    Gen gen(16);
    for (int t = 0; t < 50; ++t) {
      const int d = gen.integer(1, 3);
      const auto a = gen.measure(gen.integer(1, 6), d), b = gen.measure(gen.integer(1, 6), d);
      const auto r = wasserstein2(a, b);
      CHECK(l2_norm(barycentric_projection(r.plan)) <= r.distance + 1e-9);
    }
  }
}

TEST_CASE("plan CSV lists nonzero entries") {
  const ParticleMeasure a({{0.0}, {1.0}}, {0.5, 0.5});
  const auto p = wasserstein2(a, a).plan;
  std::stringstream ss;
  write_plan_csv(ss, p);
  CHECK(ss.str() == "i,j,mass\n0,0,0.5\n1,1,0.5\n");
}
