#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>

#include "grem/analytic.hpp"
#include "grem/convexgeom.hpp"
#include "grem/dynamics.hpp"
#include "grem/errors.hpp"
#include "grem/paths.hpp"
#include "grem/verify.hpp"

namespace grem {

namespace {

std::string fmt(double x) { return format_real(x); }

struct RandomModel {
  std::vector<double> p;
  std::vector<double> a;
};

std::vector<double> random_simplex(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) total += (x = u(rng));
  for (double& x : w) x /= total;
  return w;
}

// Twenty models with k = 1..4 cycling.
std::vector<RandomModel> random_models() {
  std::mt19937_64 rng(20240601);
  std::vector<RandomModel> out;
  for (int n = 0; n < 20; ++n) {
    const int k = 1 + n % 4;
    RandomModel m;
    m.p = random_simplex(rng, k);
    m.a = random_simplex(rng, k);
    out.push_back(std::move(m));
  }
  return out;
}

// 200 points on (0, 1.5 beta_max + 0.5], so every threshold is crossed.
std::vector<double> beta_grid(const BlockDecomposition& decomp) {
  const double top = 1.5 * decomp.betaThresholds.back() + 0.5;
  std::vector<double> g;
  for (int n = 1; n <= 200; ++n) g.push_back(top * n / 200.0);
  return g;
}

std::vector<double> every_tenth(const std::vector<double>& grid) {
  std::vector<double> out;
  for (std::size_t n = 9; n < grid.size(); n += 10) out.push_back(grid[n]);
  return out;
}

// Feasible point: random direction scaled inside (or onto) the set.
std::vector<double> random_feasible(std::mt19937_64& rng, const NestedBallSet& set) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(set.dim());
  for (double& v : x) v = g(rng);
  double scale = std::numeric_limits<double>::infinity();
  double prefix = 0.0;
  for (int m = 0; m < set.dim(); ++m) {
    prefix += x[m] * x[m];
    if (prefix > 0.0) scale = std::min(scale, std::sqrt(set.radiiSq()[m] / prefix));
  }
  // A quarter of the samples sit on the boundary.
  const double r = u(rng) < 0.25 ? 1.0 : std::pow(u(rng), 1.0 / set.dim());
  for (double& v : x) v *= scale * r * (1.0 - 1e-15);
  return x;
}

CheckResult make(int id, const std::string& title, bool pass, const std::string& detail) {
  return {"criterion " + std::to_string(id) + " (" + title + ")", pass, detail};
}

// ---------------------------------------------------------------- 1 and 2

struct PoincareSummary {
  int instances = 0;
  int violations = 0;
  double worstRelSlack = -std::numeric_limits<double>::infinity();
  std::string worstAt;
  double maxRowSumError = 0.0;
  double maxBalanceError = 0.0;
  bool supportOk = true;
  int matrices = 0;
};

const PoincareSummary& poincare_instances() {
  static PoincareSummary summary;
  static std::once_flag once;
  std::call_once(once, [] {
    struct Fixed {
      std::vector<double> p, a;
    };
    const Fixed models[] = {{{1.0}, {1.0}}, {{0.5, 0.5}, {0.7, 0.3}}, {{0.4, 0.3, 0.3}, {0.5, 0.3, 0.2}}};
    std::uint64_t seed = 1000;
    for (int k = 1; k <= 3; ++k) {
      for (int N : {4, 6, 8, 10}) {
        for (double beta : {0.3, 1.0, 2.5}) {
          ModelSpec spec;
          spec.k = k;
          spec.p = models[k - 1].p;
          spec.a = models[k - 1].a;
          spec.N = N;
          spec.beta = beta;
          spec.seed = ++seed;
          const auto H = all_hamiltonians(Environment::sample(spec), spec);
          const TransitionMatrix P(N, beta, H);
          const MatrixDiagnostics d = diagnose(P);
          ++summary.matrices;
          summary.maxRowSumError = std::max(summary.maxRowSumError, d.maxRowSumError);
          summary.maxBalanceError = std::max(summary.maxBalanceError, d.maxDetailedBalanceRelError);
          summary.supportOk = summary.supportOk && d.supportMatchesHypercube;
          const double gap = spectral_gap(P).gap;
          for (double kappa : {0.5, 1.0}) {
            const PathSet paths = build_gamma_N(H, spec, kappa, 0.25, 10);
            const double rho = congestion(P, paths).rho;
            const double slack = (1.0 / gap - rho) / rho;
            ++summary.instances;
            if (slack > tol::kPoincareRel) ++summary.violations;
            if (slack > summary.worstRelSlack) {
              summary.worstRelSlack = slack;
              summary.worstAt = "k=" + std::to_string(k) + " N=" + std::to_string(N) +
                                " beta=" + fmt(beta) + " kappa=" + fmt(kappa);
            }
          }
        }
      }
    }
  });
  return summary;
}

CheckResult criterion1() {
  const auto& s = poincare_instances();
  return make(1, "Poincare certificate 1/lambda <= rho", s.violations == 0 && s.instances >= 50,
              std::to_string(s.instances) + " instances, " + std::to_string(s.violations) +
                  " violations, max (1/lambda - rho)/rho = " + fmt(s.worstRelSlack) + " at " +
                  s.worstAt);
}

CheckResult criterion2() {
  const auto& s = poincare_instances();
  const bool ok = s.maxRowSumError <= tol::kMatrix && s.maxBalanceError <= tol::kMatrix &&
                  s.supportOk;
  return make(2, "stochasticity and detailed balance", ok,
              std::to_string(s.matrices) + " matrices, max row-sum error " +
                  fmt(s.maxRowSumError) + ", max detailed-balance rel error " +
                  fmt(s.maxBalanceError) + (s.supportOk ? "" : ", support mismatch"));
}

// ---------------------------------------------------------------- 3

CheckResult criterion3() {
  double worstForms = 0.0, worstJump = 0.0, worstSlope = 0.0;
  int points = 0, thresholds = 0;
  for (const auto& m : random_models()) {
    const auto decomp = block_decomposition(m.p, m.a);
    for (double beta : beta_grid(decomp)) {
      const auto vectors = equilibrium_vectors(decomp, m.a, beta);
      const double explicitF = free_energy_in_phase(decomp, m.p, m.a, beta, decomp.phase(beta));
      double distanceF = explicitF;
      try {
        distanceF = free_energy(vectors, decomp, m.p, m.a, beta);
      } catch (const InconsistencyError&) {
        distanceF = std::numeric_limits<double>::infinity();
      }
      worstForms = std::max(worstForms, std::abs(distanceF - explicitF));
      ++points;
    }
    const auto F = [&](double beta) {
      return free_energy_profile(decomp, m.p, m.a, beta).F;
    };
    const double h = tol::kSlopeStep;
    for (int l = 0; l < decomp.blocks(); ++l) {
      const double b = decomp.betaThresholds[l];
      const double below = free_energy_in_phase(decomp, m.p, m.a, b, l);
      const double above = free_energy_in_phase(decomp, m.p, m.a, b, l + 1);
      worstJump = std::max(worstJump, std::abs(below - above));
      const double left = (F(b) - F(b - h)) / h;
      const double right = (F(b + h) - F(b)) / h;
      worstSlope = std::max(worstSlope, std::abs(left - right));
      ++thresholds;
    }
  }
  const bool ok = worstForms <= tol::kFreeEnergyForms && worstJump <= tol::kContinuity &&
                  worstSlope <= tol::kSlope;
  return make(3, "free-energy closed form", ok,
              std::to_string(points) + " grid points, max form mismatch " + fmt(worstForms) +
                  "; " + std::to_string(thresholds) + " thresholds, max jump " +
                  fmt(worstJump) + ", max slope mismatch " + fmt(worstSlope));
}

// ---------------------------------------------------------------- 4

CheckResult criterion4() {
  std::mt19937_64 rng(77);
  double worstW = 0.0, worstVI = -std::numeric_limits<double>::infinity();
  int projections = 0;
  for (const auto& m : random_models()) {
    const auto decomp = block_decomposition(m.p, m.a);
    const auto set = grem_constraint_set(m.p);
    std::vector<std::vector<double>> samples(10000);
    for (auto& x : samples) x = random_feasible(rng, set);
    for (double beta : beta_grid(decomp)) {
      const auto vectors = equilibrium_vectors(decomp, m.a, beta);
      const auto w = project(set, vectors.mStar);
      for (std::size_t i = 0; i < w.size(); ++i)
        worstW = std::max(worstW, std::abs(w[i] - vectors.wOfBeta[i]));
      // <m* - w, x - w> <= 0 on the set.
      std::vector<double> residual(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) residual[i] = vectors.mStar[i] - w[i];
      const double base = dot(residual, w);
      for (const auto& x : samples) worstVI = std::max(worstVI, dot(residual, x) - base);
      ++projections;
    }
  }
  const bool ok = worstW <= tol::kProjection && worstVI <= tol::kVariational;
  return make(4, "projection oracle", ok,
              std::to_string(projections) + " projections, max |w - w(beta)| " + fmt(worstW) +
                  ", max variational excess " + fmt(worstVI) + " over 10^4 points each");
}

// ---------------------------------------------------------------- 5

CheckResult criterion5() {
  std::mt19937_64 rng(78);
  double worstValue = 0.0, worstSample = -std::numeric_limits<double>::infinity();
  int cases = 0;
  for (const auto& m : random_models()) {
    const auto decomp = block_decomposition(m.p, m.a);
    const auto set = grem_constraint_set(m.p);
    std::vector<std::vector<double>> samples(10000);
    for (auto& x : samples) x = random_feasible(rng, set);
    for (double beta : every_tenth(beta_grid(decomp))) {
      const auto profile = free_energy_profile(decomp, m.p, m.a, beta);
      const auto lm = linear_maximize(set, profile.mStar);
      worstValue = std::max(worstValue, std::abs(lm.value - profile.bound));
      for (const auto& x : samples)
        worstSample = std::max(worstSample, dot(profile.mStar, x) - profile.bound);
      ++cases;
    }
  }
  const bool ok = worstValue <= tol::kLinearMax && worstSample <= tol::kLinearBound;
  return make(5, "linear maximization over the constraint set", ok,
              std::to_string(cases) + " cases, max |max - <m*,w*>| " + fmt(worstValue) +
                  ", max sampled excess " + fmt(worstSample));
}

// ---------------------------------------------------------------- 6

CheckResult criterion6() {
  const double bs2 = beta_star() * beta_star();
  double worstQG = -std::numeric_limits<double>::infinity();
  double worstPsi = -std::numeric_limits<double>::infinity();
  long qgChecks = 0, psiChecks = 0;
  for (const auto& m : random_models()) {
    const int k = static_cast<int>(m.p.size());
    const auto decomp = block_decomposition(m.p, m.a);
    for (double beta : every_tenth(beta_grid(decomp))) {
      const auto profile = free_energy_profile(decomp, m.p, m.a, beta);
      for (int j = 1; j <= k; ++j) {
        for (int n = 0; n <= 10; ++n) {
          const AlphaProfile alpha(k, j, n / 10.0);
          for (const auto* weights : {&alpha.weights(), &alpha.complement()})
            for (int l = 0; l <= k; ++l)
              for (int r = l; r <= k; ++r) {
                const GTerm g = g_term(m.p, profile.mStar, *weights, l, r);
                worstQG = std::max(worstQG, bs2 * g.q - 2.0 * g.value);
                ++qgChecks;
              }
          const double psi = psi_j(m.p, profile.mStar, alpha).value;
          worstPsi = std::max(worstPsi, psi - (profile.bound + profile.F));
          ++psiChecks;
        }
      }
    }
  }
  // Equality case: one level at beta = 2.
  const std::vector<double> one{1.0};
  const auto profile = free_energy_profile(block_decomposition(one, one), one, one, 2.0);
  const double psi = psi_j(one, profile.mStar, AlphaProfile(1, 1, 0.5)).value;
  const double rhs = profile.bound + profile.F;
  constexpr double kEqualityValue = 4.70964;
  const bool equality = std::abs(psi - kEqualityValue) <= tol::kPsiEquality &&
                        std::abs(rhs - kEqualityValue) <= tol::kPsiEquality;
  const bool ok = worstQG <= tol::kQG && worstPsi <= tol::kPsi && equality;
  return make(6, "step-4 certificates", ok,
              std::to_string(qgChecks) + " Q/G checks, max beta*^2 Q - 2G = " + fmt(worstQG) +
                  "; " + std::to_string(psiChecks) + " psi checks, max psi - bound - F = " +
                  fmt(worstPsi) + "; one-level beta=2: psi = " + fmt(psi) + ", bound + F = " +
                  fmt(rhs));
}

// ---------------------------------------------------------------- 7

// Largest eigenvalue of the lazy symmetrized chain on the complement of
// sqrt(pi), by power iteration with a residual stopping rule.
double power_iteration_gap(const TransitionMatrix& P) {
  const auto n = static_cast<std::uint32_t>(P.size());
  const int N = P.N();
  const auto& pi = P.stationary();
  std::vector<double> root(n);
  for (std::uint32_t s = 0; s < n; ++s) root[s] = std::sqrt(pi[s]);
  const auto deflate = [&](std::vector<double>& v) {
    const double c = dot(v, root);
    for (std::uint32_t s = 0; s < n; ++s) v[s] -= c * root[s];
  };
  const auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::uint32_t s = 0; s < n; ++s) {
      double acc = v[s] * (1.0 - P.escape_rate(s));
      for (int i = 0; i < N; ++i) {
        const std::uint32_t t = s ^ (1U << i);
        acc += std::sqrt(pi[s] / pi[t]) * P(s, t) * v[t];
      }
      out[s] = 0.5 * (v[s] + acc);
    }
  };
  std::vector<double> v(n), w(n);
  for (std::uint32_t s = 0; s < n; ++s) v[s] = 1.0 + std::sin(1.0 + 7.0 * s);
  deflate(v);
  double norm = std::sqrt(dot(v, v));
  for (double& x : v) x /= norm;
  for (long iter = 0; iter < 20000000; ++iter) {
    apply(v, w);
    deflate(w);
    const double rq = dot(v, w);
    double res = 0.0;
    for (std::uint32_t s = 0; s < n; ++s) res += (w[s] - rq * v[s]) * (w[s] - rq * v[s]);
    if (std::sqrt(res) < 1e-11) return 2.0 - 2.0 * rq;
    norm = std::sqrt(dot(w, w));
    for (std::uint32_t s = 0; s < n; ++s) v[s] = w[s] / norm;
  }
  throw ConvergenceError("power iteration did not converge");
}

CheckResult criterion7() {
  double worstFlat = 0.0;
  for (int N = 1; N <= 10; ++N) {
    const TransitionMatrix P(N, 0.0, std::vector<double>(std::size_t{1} << N, 0.0));
    worstFlat = std::max(worstFlat, std::abs(spectral_gap(P).gap - 2.0 / N));
  }
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> betaDist(0.2, 1.5);
  double worstPower = 0.0;
  for (int n = 0; n < 20; ++n) {
    ModelSpec spec;
    spec.k = 1 + n % 3;
    spec.p = random_simplex(rng, spec.k);
    spec.a = random_simplex(rng, spec.k);
    spec.N = 3 + n % 4;
    spec.beta = betaDist(rng);
    spec.seed = 500 + n;
    const TransitionMatrix P = build_transition_matrix(Environment::sample(spec), spec);
    worstPower = std::max(worstPower, std::abs(power_iteration_gap(P) - spectral_gap(P).gap));
  }
  const bool ok = worstFlat <= tol::kGapInfiniteTemp && worstPower <= tol::kPowerIteration;
  return make(7, "spectral oracle", ok,
              "beta=0 max |gap - 2/N| " + fmt(worstFlat) + " for N<=10; power iteration max " +
                  "deviation " + fmt(worstPower) + " on 20 instances");
}

// ---------------------------------------------------------------- 8

CheckResult criterion8() {
  const int Ns[] = {2, 3, 4, 5, 6, 2, 3, 4, 5, 6};
  const double betas[] = {0.5, 1.0, 2.0, 3.0, 1.5, 2.5, 0.3, 1.2, 2.2, 0.8};
  double minMargin = std::numeric_limits<double>::infinity();
  long checks = 0, failures = 0;
  for (int n = 0; n < 10; ++n) {
    ModelSpec spec;
    spec.k = n % 2 == 0 ? 1 : 2;
    spec.p = spec.k == 1 ? std::vector<double>{1.0} : std::vector<double>{0.5, 0.5};
    spec.a = spec.k == 1 ? std::vector<double>{1.0} : std::vector<double>{0.7, 0.3};
    spec.N = Ns[n];
    spec.beta = betas[n];
    spec.seed = 800 + n;
    const TransitionMatrix P = build_transition_matrix(Environment::sample(spec), spec);
    const double gap = spectral_gap(P).gap;
    for (std::uint32_t sigma = 0; sigma < P.size(); ++sigma)
      for (double t : {0.0, 1.0, 10.0, 100.0}) {
        const TvBound b = tv_bound_check(P, sigma, t, gap);
        ++checks;
        if (!b.holds()) ++failures;
        if (!b.trivial) minMargin = std::min(minMargin, b.rhs - b.lhs);
      }
  }
  return make(8, "total-variation bound", failures == 0,
              std::to_string(checks) + " (instance, sigma, t) checks, " +
                  std::to_string(failures) + " failures, min margin " + fmt(minMargin));
}

// ---------------------------------------------------------------- 9

double binomial(int n, int m) {
  if (m < 0 || m > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= m; ++i) c = c * (n - m + i) / i;
  return c;
}

CheckResult criterion9() {
  const std::vector<std::vector<double>> partitions = {{1.0}, {0.5, 0.5}, {0.4, 0.3, 0.3}};
  long nearPairs = 0, countMismatch = 0, boundFailures = 0, powerChecks = 0;
  long farFamilies = 0, dependent = 0;
  for (const auto& p : partitions) {
    const int k = static_cast<int>(p.size());
    for (int N = std::max(2, k); N <= 8; ++N) {
      const LevelPartition part = partition_levels(p, N);
      const int n1 = part.sizes[0];
      const std::uint32_t levelMask = low_mask(n1);
      const std::uint32_t n = 1U << N;
      for (double eps : {0.25, 0.3, 0.45}) {
        const int m = ceil_fraction(eps, n1);
        const double lower = binomial(n1 - floor_fraction(eps, n1), m);
        const bool powerApplies = n1 > 0 && n1 >= 1.0 / (eps - 2 * eps * eps);
        for (std::uint32_t eta = 0; eta < n; ++eta) {
          for (std::uint32_t ups = 0; ups < n; ++ups) {
            if (eta == ups) continue;
            const std::uint32_t D = (eta ^ ups) & levelMask;
            if (is_far(__builtin_popcount(D), eps, n1)) continue;
            ++nearPairs;
            long brute = 0;
            for (std::uint32_t s = 0; s < n; ++s) {
              if ((s & ~levelMask) != (ups & ~levelMask)) continue;
              if (((s ^ eta) & D) != 0) continue;
              if (__builtin_popcount((s ^ eta) & levelMask) != m) continue;
              ++brute;
            }
            const auto listed = intermediate_candidates({eta}, {ups}, eps, part);
            if (static_cast<long>(listed.size()) != brute) ++countMismatch;
            if (brute < lower) ++boundFailures;
            if (powerApplies) {
              ++powerChecks;
              if (brute < std::pow(2 * eps, -eps * n1)) ++boundFailures;
            }
          }
        }
      }
      // Independence for every pair with at least two first-level disagreements.
      for (std::uint32_t eta = 0; eta < n; ++eta) {
        for (std::uint32_t ups = 0; ups < n; ++ups) {
          if (__builtin_popcount((eta ^ ups) & levelMask) < 2) continue;
          ++farFamilies;
          const auto family = independent_family({eta}, {ups}, part);
          bool ok = true;
          for (std::size_t x = 0; x < family.size() && ok; ++x) {
            const auto& px = family[x].vertices;
            if (px.front() != Configuration{eta} || px.back() != Configuration{ups}) ok = false;
            for (std::size_t y = x + 1; y < family.size() && ok; ++y) {
              const auto& py = family[y].vertices;
              for (std::size_t i = 1; i + 1 < px.size() && ok; ++i)
                for (std::size_t j = 1; j + 1 < py.size() && ok; ++j)
                  if (((px[i].bits ^ py[j].bits) & levelMask) == 0) ok = false;
            }
          }
          if (!ok) ++dependent;
        }
      }
    }
  }
  const bool ok = countMismatch == 0 && boundFailures == 0 && dependent == 0;
  return make(9, "combinatorial exactness", ok,
              std::to_string(nearPairs) + " near pairs, " + std::to_string(countMismatch) +
                  " count mismatches, " + std::to_string(boundFailures) +
                  " bound failures (" + std::to_string(powerChecks) +
                  " power-bound checks); " + std::to_string(farFamilies) + " families, " +
                  std::to_string(dependent) + " not independent");
}

// ---------------------------------------------------------------- 10

CheckResult criterion10() {
  constexpr int kSeeds = 100;
  const std::vector<double> half{0.5, 0.5};
  const auto decomp = block_decomposition(half, half);
  const int Ns[] = {8, 10, 12};
  std::string detail;
  bool ok = true;
  for (double beta : {0.5, 2.0}) {
    const double F = free_energy_profile(decomp, half, half, beta).F;
    double errors[3];
    for (int n = 0; n < 3; ++n) {
      double sum = 0.0;
      for (int seed = 1; seed <= kSeeds; ++seed) {
        ModelSpec spec{2, half, half, Ns[n], beta, static_cast<std::uint64_t>(seed)};
        sum += gibbs_summary(Environment::sample(spec), spec).finiteVolumeFreeEnergy;
      }
      errors[n] = std::abs(sum / kSeeds - F);
    }
    ok = ok && errors[2] < errors[0];
    detail += "beta=" + fmt(beta) + " |mean F_N - F| at N=8,10,12: " + fmt(errors[0]) + ", " +
              fmt(errors[1]) + ", " + fmt(errors[2]) + "; ";
  }
  double fractions[3];
  for (int n = 0; n < 3; ++n) {
    int good = 0;
    for (int seed = 1; seed <= kSeeds; ++seed) {
      ModelSpec spec{2, half, half, Ns[n], 1.0, static_cast<std::uint64_t>(seed)};
      const auto H = all_hamiltonians(Environment::sample(spec), spec);
      if (gamma_N_all_good(H, spec, 1.0, 0.25, 12)) ++good;
    }
    fractions[n] = static_cast<double>(good) / kSeeds;
  }
  ok = ok && fractions[0] <= fractions[1] && fractions[1] <= fractions[2];
  detail += "all-good fraction at N=8,10,12: " + fmt(fractions[0]) + ", " + fmt(fractions[1]) +
            ", " + fmt(fractions[2]);
  return make(10, "statistical trends", ok, detail);
}

}  // namespace

CheckResult acceptance_criterion(int id) {
  switch (id) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9();
    case 10: return criterion10();
  }
  throw InvalidArgument("acceptance criteria are numbered 1.." +
                        std::to_string(kAcceptanceCriteria));
}

}  // namespace grem
