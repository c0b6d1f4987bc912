#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "asymgame/kernels.hpp"
#include "support.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace asymgame;
using testing_support::Gen;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.row(0), b.row(0), a.rows() * a.cols() * sizeof(double)) == 0;
}

std::vector<double> random_dense(Gen& gen, std::size_t n) {
  std::vector<double> q(n);
  double s = 0;
  for (double& x : q) s += (x = gen.real(0, 1) < 0.3 ? 0.0 : gen.real(0.1, 1));
  if (s == 0) q[0] = s = 1;
  for (double& x : q) x /= s;
  return q;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  Gen gen(61);
  for (int t = 0; t < 25; ++t) {
    const int n = gen.integer(1, 4);
    const auto p = testing_support::random_scalar_affine(gen, gen.integer(1, 3), gen.integer(1, 3), 1.0,
                                                         TerminalKind::kAbs);
    const auto mu = gen.measure(gen.integer(1, 6), 1);
    const SequenceSpace sp(n, static_cast<int>(p.v_grid.size()));
    const auto q = random_dense(gen, sp.size());

    const auto rs = kernels::best_responses_serial(p, mu, sp, q);
    const auto rp = kernels::best_responses_parallel(p, mu, sp, q);
    REQUIRE(rs.size() == rp.size());
    StrategyTreeI tree{n, sp.v_count(), {}};
    for (std::size_t i = 0; i < rs.size(); ++i) {
      CHECK(rs[i].decisions == rp[i].decisions);
      CHECK(std::memcmp(&rs[i].value, &rp[i].value, sizeof(double)) == 0);
      CHECK(rs[i].zero_probability_prefix == rp[i].zero_probability_prefix);
      tree.decisions.push_back(rs[i].decisions);
    }
    CHECK(bitwise_equal(kernels::cut_coefficients_serial(p, mu, tree, sp),
                        kernels::cut_coefficients_parallel(p, mu, tree, sp)));
    if (n <= 2) {
      CHECK(bitwise_equal(kernels::atom_tree_payoffs_serial(p, mu.point(0), sp),
                          kernels::atom_tree_payoffs_parallel(p, mu.point(0), sp)));
    }
  }
}

TEST_CASE("cut coefficients are tree payoffs against pure sequences") {
  Gen gen(62);
  const auto p = testing_support::random_scalar_affine(gen, 2, 3, 1.0, TerminalKind::kQuadratic);
  const auto mu = gen.measure(3, 1);
  const SequenceSpace sp(2, 3);
  StrategyTreeI tree{2, 3, {}};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::vector<int> d(sp.prefix_nodes());
    for (int& x : d) x = gen.integer(0, 1);
    tree.decisions.push_back(d);
  }
  const auto c = kernels::cut_coefficients_parallel(p, mu, tree, sp);
  for (std::size_t s = 0; s < sp.size(); ++s) {
    CHECK(std::abs(c[s] - payoff(p, mu, tree, MixedStrategyII::pure(sp.decode(s)))) <= 1e-12);
  }
}

TEST_CASE("prefix masses sum conditional structure") {
  const SequenceSpace sp(2, 2);
  const auto m = kernels::prefix_masses(sp, {0.1, 0.2, 0.3, 0.4});
  REQUIRE(m.size() == 3);
  CHECK(m[0][0] == doctest::Approx(1.0));
  CHECK(m[1][0] == doctest::Approx(0.3));
  CHECK(m[1][1] == doctest::Approx(0.7));
  CHECK(m[2][3] == doctest::Approx(0.4));
}

TEST_CASE("decode_tree digits") {
  CHECK(kernels::decode_tree(5, 3, 2) == std::vector<int>{1, 0, 1});
  CHECK(kernels::decode_tree(0, 2, 3) == std::vector<int>{0, 0});
  CHECK(kernels::decode_tree(8, 2, 3) == std::vector<int>{2, 2});
}
