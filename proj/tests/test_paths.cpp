#include <doctest.h>

#include <cmath>

#include "grem/dynamics.hpp"
#include "grem/errors.hpp"
#include "grem/paths.hpp"
#include "oracles.hpp"

using namespace grem;

namespace {

ModelSpec two_level(int N, double beta, std::uint64_t seed) {
  return ModelSpec{2, {0.5, 0.5}, {0.7, 0.3}, N, beta, seed};
}

std::vector<std::uint32_t> bits_of(const Path& p) {
  std::vector<std::uint32_t> out;
  for (auto c : p.vertices) out.push_back(c.bits);
  return out;
}

}  // namespace

TEST_SUITE("paths") {

TEST_CASE("flip orders") {
  // Superscript 1 (0-based) on three spins: flips 1, 2, then 0.
  CHECK(flip_order({0b000}, {0b111}, 1, 3) == std::vector<int>{1, 2, 0});
  CHECK(bits_of(gamma_i_path({0b000}, {0b111}, 1, 3)) ==
        std::vector<std::uint32_t>{0b000, 0b010, 0b110, 0b111});
  CHECK(flip_order({0b0000}, {0b1011}, 0, 4) == std::vector<int>{0, 1, 3});
  for (int i = 0; i < 5; ++i) CHECK(gamma_i_path({0b00100}, {0b00000}, i, 5).length() == 1);
  CHECK_THROWS_AS(gamma_i_path({3}, {3}, 0, 4), InvalidArgument);
}

TEST_CASE("independent family examples") {
  const auto part = partition_levels(std::vector<double>{0.5, 0.5}, 4);
  const auto fam = independent_family({0b0000}, {0b0011}, part);
  REQUIRE(fam.size() == 2);
  CHECK(pairwise_independent(fam, part));
  CHECK_THROWS_AS(independent_family({0b0000}, {0b0001}, part), InvalidArgument);

  const auto part6 = partition_levels(std::vector<double>{0.5, 0.5}, 6);
  for (std::uint32_t eta = 0; eta < 64; ++eta)
    for (std::uint32_t ups = 0; ups < 64; ++ups) {
      if (__builtin_popcount((eta ^ ups) & 0b111) < 2) continue;
      const auto f = independent_family({eta}, {ups}, part6);
      CHECK(f.size() == static_cast<std::size_t>(__builtin_popcount((eta ^ ups) & 0b111)));
      CHECK(pairwise_independent(f, part6));
    }
}

TEST_CASE("intermediate candidates") {
  const auto part = partition_levels(std::vector<double>{0.5, 0.5}, 8);  // N_1 = 4
  const auto c = intermediate_candidates({0b00000000}, {0b10000001}, 0.3, part);
  CHECK(c.size() == 3);
  for (auto w : c) {
    CHECK((w.bits & 1U) == 0);                  // agrees with eta on D
    CHECK((w.bits >> 4) == 0b1000);             // upsilon's tail
    CHECK(__builtin_popcount(w.bits & 0xF) == 2);
  }
  CHECK(std::is_sorted(c.begin(), c.end()));
  const auto same = intermediate_candidates({0b0101}, {0b11110101}, 0.3, part);
  CHECK(same.size() == static_cast<std::size_t>(oracle::binomial(4, 2)));
  CHECK_THROWS_AS(intermediate_candidates({0}, {0b1111}, 0.3, part), InvalidArgument);
}

TEST_CASE("candidate counts against enumeration and the binomial bound") {
  for (int N : {4, 6, 8}) {
    const auto part = partition_levels(std::vector<double>{0.5, 0.5}, N);
    const int n1 = part.sizes[0];
    for (double eps : {0.25, 0.4}) {
      const int m = ceil_fraction(eps, n1);
      for (std::uint32_t eta = 0; eta < (1U << N); eta += 3)
        for (std::uint32_t ups = 0; ups < (1U << N); ++ups) {
          if (eta == ups || is_far(__builtin_popcount((eta ^ ups) & low_mask(n1)), eps, n1))
            continue;
          const long count = oracle::intermediate_count(eta, ups, N, n1, m);
          CHECK(static_cast<long>(intermediate_candidates({eta}, {ups}, eps, part).size()) == count);
          CHECK(count >= oracle::binomial(n1 - floor_fraction(eps, n1), m));
        }
    }
  }
}

TEST_CASE("fraction helpers guard representation error") {
  CHECK(ceil_fraction(0.3, 10) == 3);
  CHECK(floor_fraction(0.7, 10) == 7);
  CHECK(is_far(3, 0.3, 10));
  CHECK_FALSE(is_far(2, 0.3, 10));
}

TEST_CASE("everything good: direct rule with the smallest superscript") {
  const auto spec = two_level(6, 1.0, 3);
  const auto H = all_hamiltonians(Environment::sample(spec), spec);
  const auto paths = build_gamma_N(H, spec, 1e6, 0.25);
  CHECK(paths.allGood());
  CHECK(paths.goodFraction() == 1.0);
  CHECK(paths.ruleCounts().directFallback == 0);
  CHECK(paths.ruleCounts().nearFallback == 0);
  for (std::uint32_t eta = 0; eta < 64; ++eta)
    for (std::uint32_t ups = 0; ups < 64; ++ups) {
      if (eta == ups) continue;
      const auto& r = paths.route({eta}, {ups});
      if (r.rule == Rule::DirectFirstGood) {
        CHECK(r.superscript == 0);
        CHECK(bits_of(paths.path({eta}, {ups})) == bits_of(gamma_i_path({eta}, {ups}, 0, 6)));
      }
    }
}

TEST_CASE("structural invariants of the path set") {
  for (double kappa : {0.0, 0.5, 1.0}) {
    const auto spec = two_level(8, 1.0, 17);
    const auto H = all_hamiltonians(Environment::sample(spec), spec);
    const auto paths = build_gamma_N(H, spec, kappa, 0.25);
    const auto part = partition_levels(spec.p, 8);
    const EdgeClassification cls(H, kappa, 8);
    const auto c = paths.ruleCounts();
    CHECK(c.directFirstGood + c.directFallback + c.concatenated + c.nearFallback ==
          paths.pairCount());
    CHECK(paths.maxLength() <= 8);
    for (std::uint32_t eta = 0; eta < 256; ++eta)
      for (std::uint32_t ups = 0; ups < 256; ++ups) {
        if (eta == ups) continue;
        const auto& r = paths.route({eta}, {ups});
        const Path p = paths.path({eta}, {ups});
        CHECK(p.front() == Configuration{eta});
        CHECK(p.back() == Configuration{ups});
        CHECK(is_self_avoiding(p));
        CHECK(cls.good_path(p) == r.good);
        for (std::size_t e = 0; e + 1 < p.vertices.size(); ++e)
          CHECK(hamming(p.vertices[e], p.vertices[e + 1]) == 1);
        if (r.rule == Rule::Concatenated) {
          CHECK(p.length() < 8);
          const std::uint32_t D = (eta ^ ups) & 0xF;
          CHECK(__builtin_popcount((eta ^ r.omega) & 0xF) >= 1);
          CHECK(is_far(__builtin_popcount((eta ^ r.omega) & 0xF), 0.25, 4));
          const int dPrime = __builtin_popcount((r.omega ^ D) ^ ups);
          CHECK(dPrime >= 1);
          CHECK(dPrime <= 2);
          CHECK(cls.good({r.omega}));
        }
      }
  }
  (void)0;
}

TEST_CASE("nothing good: fallbacks keep the set complete") {
  const auto spec = two_level(6, 1.0, 5);
  const auto H = all_hamiltonians(Environment::sample(spec), spec);
  const auto paths = build_gamma_N(H, spec, 1e-12, 0.25);
  const auto& c = paths.ruleCounts();
  CHECK(c.directFallback + c.nearFallback > 0);
  CHECK(paths.pairCount() == 64 * 63);
  for (std::uint32_t eta = 0; eta < 64; ++eta)
    for (std::uint32_t ups = 0; ups < 64; ++ups) {
      if (eta == ups) continue;
      const auto& r = paths.route({eta}, {ups});
      if (r.rule == Rule::DirectFallback || r.rule == Rule::NearFallback)
        CHECK(bits_of(paths.path({eta}, {ups})) == bits_of(gamma_i_path({eta}, {ups}, 0, 6)));
    }
}

TEST_CASE("construction is deterministic and streaming agrees") {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto spec = two_level(8, 1.0, seed);
    const auto H = all_hamiltonians(Environment::sample(spec), spec);
    const auto a = build_gamma_N(H, spec, 1.0, 0.25);
    const auto b = build_gamma_N(H, spec, 1.0, 0.25);
    CHECK(a.goodFraction() == b.goodFraction());
    for (std::uint32_t eta = 0; eta < 256; eta += 7)
      for (std::uint32_t ups = 0; ups < 256; ++ups)
        CHECK(a.route({eta}, {ups}).flips == b.route({eta}, {ups}).flips);
    CHECK(gamma_N_all_good(H, spec, 1.0, 0.25) == a.allGood());
  }
}

TEST_CASE("domain checks") {
  const auto spec = two_level(6, 1.0, 1);
  const auto H = all_hamiltonians(Environment::sample(spec), spec);
  CHECK_THROWS_AS(build_gamma_N(H, spec, 1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(build_gamma_N(H, spec, 1.0, 0.0), InvalidArgument);
  auto big = two_level(13, 1.0, 1);
  CHECK_THROWS_AS(build_gamma_N(std::vector<double>(1 << 13), big, 1.0, 0.25), ResourceCapExceeded);
}

TEST_CASE("congestion: single spin") {
  const ModelSpec spec{1, {1.0}, {1.0}, 1, 1.3, 0};
  const std::vector<double> H{0.4, -0.2};
  const TransitionMatrix P(1, 1.3, H);
  const auto paths = build_gamma_N(H, spec, 1.0, 0.25);
  const auto pi = P.stationary();
  const double expected =
      std::max(pi[0] * pi[1] / (pi[0] * P(0, 1)), pi[1] * pi[0] / (pi[1] * P(1, 0)));
  const auto c = congestion(P, paths);
  CHECK(c.rho == doctest::Approx(expected));
  CHECK(1.0 / spectral_gap(P).gap <= c.rho * (1 + 1e-9));
}

TEST_CASE("congestion: infinite temperature, two spins") {
  const ModelSpec spec{1, {1.0}, {1.0}, 2, 0.0, 0};
  const std::vector<double> H(4, 0.0);
  const TransitionMatrix P(2, 0.0, H);
  const auto paths = build_gamma_N(H, spec, 1.0, 0.25);
  const auto c = congestion(P, paths);
  CHECK(c.rho == doctest::Approx(oracle::congestion(P.entries(), P.stationary(), paths)));
  CHECK(1.0 / spectral_gap(P).gap == doctest::Approx(1.0));
  CHECK(1.0 <= c.rho);
}

TEST_CASE("congestion against explicit vertex lists and the Poincare inequality") {
  for (std::uint64_t seed : {1, 2, 3})
    for (double beta : {0.5, 2.0})
      for (int N : {4, 6}) {
        const auto spec = two_level(N, beta, seed);
        const auto P = build_transition_matrix(Environment::sample(spec), spec);
        const auto paths = build_gamma_N(P.hamiltonians(), spec, 1.0, 0.25);
        const auto c = congestion(P, paths);
        CHECK(c.rho == doctest::Approx(oracle::congestion(P.entries(), P.stationary(), paths))
                           .epsilon(1e-12));
        CHECK(1.0 / spectral_gap(P).gap <= c.rho * (1 + 1e-9));
      }
}

}  // TEST_SUITE
