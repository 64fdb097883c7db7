#include <doctest.h>

#include <cmath>
#include <random>

#include "grem/analytic.hpp"
#include "grem/convexgeom.hpp"
#include "grem/errors.hpp"
#include "oracles.hpp"

using namespace grem;

namespace {

std::vector<double> random_feasible(std::mt19937_64& rng, const NestedBallSet& set) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(set.dim());
  for (double& v : x) v = g(rng);
  double scale = 1e300, prefix = 0.0;
  for (int m = 0; m < set.dim(); ++m) {
    prefix += x[m] * x[m];
    scale = std::min(scale, std::sqrt(set.radiiSq()[m] / prefix));
  }
  const double r = u(rng);
  for (double& v : x) v *= scale * r;
  return x;
}

double variational_excess(const std::vector<double>& f, const std::vector<double>& u,
                          const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (f[i] - u[i]) * (v[i] - u[i]);
  return s;
}

}  // namespace

TEST_SUITE("convexgeom") {

TEST_CASE("points inside are fixed and a single ball scales radially") {
  NestedBallSet set({1.0, 2.0});
  const std::vector<double> inside{0.5, 0.5};
  const auto u = project(set, inside);
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(0.5));
  CHECK(project(NestedBallSet({1.0}), std::vector<double>{2.0})[0] == doctest::Approx(1.0));
}

TEST_CASE("two-dimensional example against grid search and the variational inequality") {
  NestedBallSet set({1.0, 1.5});
  const std::vector<double> f{2.0, 2.0};
  const auto u = project(set, f);
  const auto grid = oracle::grid_projection_2d({1.0, 1.5}, f, 1e-3);
  CHECK(std::abs(u[0] - grid[0]) <= 2e-3);
  CHECK(std::abs(u[1] - grid[1]) <= 2e-3);
  std::mt19937_64 rng(1);
  double worst = -1.0;
  for (int n = 0; n < 10000; ++n)
    worst = std::max(worst, variational_excess(f, u, random_feasible(rng, set)));
  CHECK(worst <= 1e-9);
}

TEST_CASE("projection matches active-set enumeration") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 4;
    std::vector<double> radii(d), f(d);
    double acc = 0.0;
    for (int m = 0; m < d; ++m) radii[m] = (acc += u(rng));
    for (double& x : f) x = g(rng);
    const auto expected = oracle::kkt_projection(radii, f);
    const auto got = project(NestedBallSet(radii), f);
    REQUIRE(expected.size() == got.size());
    for (int i = 0; i < d; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-8));
  }
}

TEST_CASE("projection does not depend on the initial correction state") {
  NestedBallSet set({0.5, 1.0, 1.2});
  const std::vector<double> f{1.0, -2.0, 0.7};
  ProjectionOptions opts;
  opts.initialCorrections = {{0.3, -0.1, 0.2}, {-1.0, 0.5, 0.0}, {0.0, 0.0, 2.0}};
  const auto a = project(set, f);
  const auto b = project(set, f, opts);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
  CHECK(set.contains(a, 1e-12));
}

TEST_CASE("radii are reduced to a nondecreasing sequence") {
  NestedBallSet set({2.0, 1.0, 3.0});
  CHECK(set.radiiSq()[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(NestedBallSet({-1.0}), InvalidArgument);
}

TEST_CASE("linear maximization") {
  NestedBallSet unit({1.0, 1.0});
  auto r = linear_maximize(unit, std::vector<double>{0.0, 1.0});
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.maximizer[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.maximizer[1] == doctest::Approx(1.0));
  CHECK(linear_maximize(unit, std::vector<double>{0.0, 0.0}).value == 0.0);

  const std::vector<double> p{0.5, 0.5}, a{0.7, 0.3};
  const auto d = block_decomposition(p, a);
  for (double beta : {0.4, 1.2, 3.0}) {
    const auto prof = free_energy_profile(d, p, a, beta);
    CHECK(linear_maximize(grem_constraint_set(p), prof.mStar).value ==
          doctest::Approx(prof.bound).epsilon(1e-6));
  }
}

TEST_CASE("step-4 building blocks") {
  const std::vector<double> p{0.4, 0.3, 0.3}, a{0.5, 0.3, 0.2};
  const auto d = block_decomposition(p, a);
  const auto prof = free_energy_profile(d, p, a, 1.7);
  const double bs2 = beta_star() * beta_star();

  SUBCASE("full-mass Q") {
    const AlphaProfile full(3, 3, 1.0);
    CHECK(q_value(p, full.weights(), 0, 3) == doctest::Approx(1.0));
  }
  SUBCASE("empty ranges vanish") {
    const AlphaProfile alpha(3, 2, 0.4);
    for (int l = 0; l <= 3; ++l) {
      CHECK(g_term(p, prof.mStar, alpha.weights(), l, l).value == 0.0);
      CHECK(phi_hat(p, prof.mStar, l, l).value == 0.0);
    }
  }
  SUBCASE("both G forms agree and satisfy the Q/G inequality") {
    for (int j = 1; j <= 3; ++j)
      for (double al : {0.0, 0.3, 1.0}) {
        const AlphaProfile alpha(3, j, al);
        for (int l = 0; l <= 3; ++l)
          for (int r = l; r <= 3; ++r) {
            const auto g = g_term(p, prof.mStar, alpha.weights(), l, r);
            CHECK(g.value == doctest::Approx(g.valueAlt).epsilon(1e-10));
            CHECK(bs2 * g.q <= 2 * g.value + 1e-9);
          }
      }
  }
  SUBCASE("maximizer norm on anchored sets") {
    for (int r = 0; r < 3; ++r)
      for (int s = r + 1; s <= 3; ++s) {
        const auto ph = phi_hat(p, prof.mStar, r, s);
        double norm2 = 0.0, mass = 0.0;
        for (double z : ph.z) norm2 += z * z;
        for (int m = r; m < s; ++m) mass += p[m];
        CHECK(norm2 == doctest::Approx(bs2 * mass).epsilon(1e-8));
      }
  }
  SUBCASE("psi below bound plus F") {
    for (int j = 1; j <= 3; ++j)
      for (int n = 0; n <= 10; ++n) {
        const auto psi = psi_j(p, prof.mStar, AlphaProfile(3, j, n / 10.0));
        CHECK(psi.value <= prof.bound + prof.F + 1e-8);
      }
  }
  SUBCASE("aggregate quantities") {
    ModelSpec spec{3, p, a, 6, 1.7, 1};
    const auto q = step4_quantities(spec, prof, AlphaProfile(3, 2, 0.5), 0, 2, 3);
    CHECK(q.gValue == doctest::Approx(q.gValueAlt));
    CHECK(q.wProj.size() == 2);
    CHECK(q.phiMaximizer.size() == 1);
    CHECK_THROWS_AS(step4_quantities(spec, prof, AlphaProfile(3, 2, 0.5), 2, 1, 3),
                    InvalidArgument);
  }
}

TEST_CASE("one-level equality case") {
  const std::vector<double> one{1.0};
  const auto prof = free_energy_profile(block_decomposition(one, one), one, one, 2.0);
  for (double al : {0.0, 0.5, 1.0}) {
    const auto psi = psi_j(one, prof.mStar, AlphaProfile(1, 1, al));
    CHECK(psi.value == doctest::Approx(4.70964).epsilon(1e-5));
  }
  CHECK(prof.bound + prof.F == doctest::Approx(4.70964).epsilon(1e-5));
}

}  // TEST_SUITE
