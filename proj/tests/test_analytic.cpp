#include <doctest.h>

#include <cmath>
#include <random>

#include "grem/analytic.hpp"
#include "oracles.hpp"

using namespace grem;

namespace {
const std::vector<double> kHalf{0.5, 0.5};
const std::vector<double> kA73{0.7, 0.3};
const std::vector<double> kOne{1.0};
}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("beta star") { CHECK(beta_star() == doctest::Approx(1.17741).epsilon(1e-5)); }

TEST_CASE("block decomposition examples") {
  const auto d = block_decomposition(kHalf, kA73);
  CHECK(d.jStars == std::vector<int>{1, 2});
  REQUIRE(d.betaThresholds.size() == 2);
  CHECK(d.betaThresholds[0] == doctest::Approx(0.99511).epsilon(1e-5));
  CHECK(d.betaThresholds[0] == doctest::Approx(0.9950931).epsilon(1e-7));
  // beta* sqrt(5/3) = 1.5200298; the often-quoted 1.52012 is a rounding slip.
  CHECK(d.betaThresholds[1] == doctest::Approx(1.5200298).epsilon(1e-6));
  CHECK(d.betaThresholds[1] == doctest::Approx(beta_star() * std::sqrt(5.0 / 3.0)));
  CHECK(d.betaThresholds[0] == doctest::Approx(beta_star() * std::sqrt(5.0 / 7.0)));

  const auto collapsed = block_decomposition(kHalf, std::vector<double>{0.3, 0.7});
  CHECK(collapsed.jStars == std::vector<int>{2});
  CHECK(collapsed.betaThresholds[0] == doctest::Approx(beta_star()));

  const auto rem = block_decomposition(kOne, kOne);
  CHECK(rem.jStars == std::vector<int>{1});
  CHECK(rem.betaThresholds[0] == doctest::Approx(beta_star()));
}

TEST_CASE("ties merge into the longer block so thresholds stay strictly increasing") {
  const auto d = block_decomposition(kHalf, kHalf);
  CHECK(d.jStars == std::vector<int>{2});
  CHECK(d.betaThresholds[0] == doctest::Approx(beta_star()));
}

TEST_CASE("phase counts thresholds at or below beta") {
  const auto d = block_decomposition(kHalf, kA73);
  CHECK(d.phase(0.5) == 0);
  CHECK(d.phase(d.betaThresholds[0]) == 1);
  CHECK(d.phase(1.2) == 1);
  CHECK(d.phase(3.0) == 2);
}

TEST_CASE("equilibrium vectors") {
  const auto rem = block_decomposition(kOne, kOne);
  auto v = equilibrium_vectors(rem, kOne, 0.5);
  CHECK(v.mStar[0] == doctest::Approx(0.5));
  CHECK(v.wOfBeta[0] == doctest::Approx(0.5));
  v = equilibrium_vectors(rem, kOne, 2.0);
  CHECK(v.wOfBeta[0] == doctest::Approx(1.17741).epsilon(1e-5));
  CHECK(v.wStar[0] == doctest::Approx(beta_star()));

  const auto d = block_decomposition(kHalf, kA73);
  v = equilibrium_vectors(d, kA73, 1.2);
  CHECK(v.phaseIndex == 1);
  // beta_1 sqrt(0.7) = 0.8325546 and 1.2 sqrt(0.3) = 0.6572671.
  CHECK(v.wOfBeta[0] == doctest::Approx(0.8325546).epsilon(1e-7));
  CHECK(v.wOfBeta[1] == doctest::Approx(0.6572671).epsilon(1e-7));
}

TEST_CASE("free energy and bound examples") {
  const auto rem = block_decomposition(kOne, kOne);
  CHECK(free_energy_profile(rem, kOne, kOne, 0.5).F == doctest::Approx(std::log(2.0) + 0.125).epsilon(1e-12));
  CHECK(free_energy_profile(rem, kOne, kOne, 2.0).F == doctest::Approx(2.3548200450).epsilon(1e-10));
  CHECK(free_energy_profile(rem, kOne, kOne, 1e-9).F == doctest::Approx(std::log(2.0)));
  for (double beta : {0.3, 1.0, 2.0, 4.0})
    CHECK(free_energy_profile(rem, kOne, kOne, beta).bound == doctest::Approx(beta * beta_star()));

  const auto d = block_decomposition(kHalf, kA73);
  const auto prof = free_energy_profile(d, kHalf, kA73, 1.2);
  // 1.2 (beta_1 0.7 + beta_2 0.3) = 1.3830889.
  CHECK(prof.bound == doctest::Approx(1.3830889).epsilon(1e-6));
  CHECK(theorem_bound(prof) == doctest::Approx(prof.bound));
  CHECK(free_energy_profile(d, kHalf, kA73, 1e-9).bound == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("one level reproduces the REM closed form") {
  const auto rem = block_decomposition(kOne, kOne);
  for (int n = 1; n <= 60; ++n) {
    const double beta = 0.05 * n;
    CHECK(free_energy_profile(rem, kOne, kOne, beta).F ==
          doctest::Approx(oracle::rem_free_energy(beta)).epsilon(1e-12));
  }
}

TEST_CASE("explicit and distance forms agree on random models") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + trial % 4;
    std::vector<double> p(k), a(k);
    double sp = 0, sa = 0;
    for (int j = 0; j < k; ++j) sp += (p[j] = u(rng)), sa += (a[j] = u(rng));
    for (int j = 0; j < k; ++j) p[j] /= sp, a[j] /= sa;
    const auto d = block_decomposition(p, a);
    for (int l = 1; l < d.blocks(); ++l) CHECK(d.betaThresholds[l - 1] < d.betaThresholds[l]);
    for (int n = 1; n <= 40; ++n) {
      const double beta = 0.1 * n;
      const auto v = equilibrium_vectors(d, a, beta);
      CHECK(free_energy(v, d, p, a, beta) ==
            doctest::Approx(free_energy_in_phase(d, p, a, beta, d.phase(beta))).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
