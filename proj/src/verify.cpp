#include "grem/verify.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "grem/analytic.hpp"
#include "grem/convexgeom.hpp"
#include "grem/dynamics.hpp"
#include "grem/errors.hpp"
#include "grem/paths.hpp"

namespace grem {

bool VerifyReport::allPassed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void print_report(const VerifyReport& report, std::ostream& out) {
  for (const auto& c : report.checks)
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

namespace {

// Worst observed excess for one invariant across the grid. `excess` <= 0
// means the instance satisfied it.
class Tally {
 public:
  explicit Tally(std::string name) : name_(std::move(name)) {}

  void record(double excess, const std::string& where) {
    ++count_;
    if (excess > worst_) {
      worst_ = excess;
      worstAt_ = where;
    }
    if (!(excess <= 0.0) && pass_) {
      pass_ = false;
      firstFailure_ = where;
    }
  }

  CheckResult result() const {
    CheckResult r{name_, pass_, ""};
    r.detail = std::to_string(count_) + " checks, worst excess " + format_real(worst_);
    if (!worstAt_.empty()) r.detail += " at " + worstAt_;
    if (!pass_) r.detail += "; first failure at " + firstFailure_;
    return r;
  }

 private:
  std::string name_;
  long count_ = 0;
  double worst_ = -std::numeric_limits<double>::infinity();
  std::string worstAt_;
  bool pass_ = true;
  std::string firstFailure_;
};

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

std::vector<double> alpha_grid(const ExperimentConfig& config) {
  if (!config.alphas.empty()) return config.alphas;
  std::vector<double> g;
  for (int n = 0; n <= 10; ++n) g.push_back(n / 10.0);
  return g;
}

}  // namespace

VerifyReport verify_instances(const ExperimentConfig& config) {
  config.validate();
  const int cap = dense_cap();
  for (int N : config.Ns)
    if (N > cap)
      throw ResourceCapExceeded("N=" + std::to_string(N) + " exceeds dense cap " +
                                std::to_string(cap));

  Tally gibbsNorm("model.gibbs_normalized");
  Tally forms("analytic.free_energy_forms");
  Tally thresholds("analytic.thresholds_increasing");
  Tally projection("convexgeom.projection_matches_w");
  Tally linearMax("convexgeom.linear_max_equals_bound");
  Tally qg("convexgeom.qg_inequality");
  Tally psi("convexgeom.psi_bound");
  Tally stochastic("dynamics.row_sums");
  Tally balance("dynamics.detailed_balance");
  Tally support("dynamics.hypercube_support");
  Tally gapPositive("dynamics.gap_positive");
  Tally tv("dynamics.tv_bound");
  Tally pathsValid("paths.complete_self_avoiding");
  Tally lengths("paths.length_bounds");
  Tally geometry("paths.rule2_geometry");
  Tally poincare("paths.poincare_certificate");
  Tally logPoincare("cli.row_log_poincare");

  const BlockDecomposition decomp = block_decomposition(config.p, config.a);
  {
    double excess = -std::numeric_limits<double>::infinity();
    for (int l = 1; l < decomp.blocks(); ++l)
      excess = std::max(excess, decomp.betaThresholds[l - 1] - decomp.betaThresholds[l]);
    thresholds.record(decomp.blocks() > 1 ? excess : -1.0, "model");
  }
  const NestedBallSet psiK = grem_constraint_set(config.p);
  const double bs2 = beta_star() * beta_star();
  const auto alphas = alpha_grid(config);
  std::vector<int> js = config.js;
  if (js.empty())
    for (int j = 1; j <= config.k; ++j) js.push_back(j);

  // Analytic and convex-geometry invariants depend on beta only.
  for (double beta : config.betas) {
    const std::string where = "beta=" + format_real(beta);
    const FreeEnergyProfile profile = free_energy_profile(decomp, config.p, config.a, beta);
    const double explicitF =
        free_energy_in_phase(decomp, config.p, config.a, beta, decomp.phase(beta));
    forms.record(std::abs(explicitF - profile.F) - tol::kFreeEnergyForms, where);

    const auto w = project(psiK, profile.mStar);
    projection.record(max_abs_diff(w, profile.wOfBeta) - tol::kProjection, where);
    const auto lm = linear_maximize(psiK, profile.mStar);
    linearMax.record(std::abs(lm.value - profile.bound) - tol::kLinearMax, where);

    for (int j : js) {
      for (double alpha : alphas) {
        const AlphaProfile prof(config.k, j, alpha);
        const std::string at = where + " j=" + std::to_string(j) + " alpha=" + format_real(alpha);
        for (const auto* weights : {&prof.weights(), &prof.complement()})
          for (int l = 0; l <= config.k; ++l)
            for (int r = l; r <= config.k; ++r) {
              const GTerm g = g_term(config.p, profile.mStar, *weights, l, r);
              qg.record(bs2 * g.q - 2.0 * g.value - tol::kQG, at);
            }
        const PsiResult ps = psi_j(config.p, profile.mStar, prof);
        psi.record(ps.value - (profile.bound + profile.F) - tol::kPsi, at);
      }
    }
  }

  for (int N : config.Ns) {
    for (double beta : config.betas) {
      for (std::uint64_t seed : config.seeds) {
        const std::string where = "N=" + std::to_string(N) + " beta=" + format_real(beta) +
                                  " seed=" + std::to_string(seed);
        const ModelSpec spec = config.spec(N, beta, seed);
        const Environment env = Environment::sample(spec);
        const GibbsSummary gibbs = gibbs_summary(env, spec, cap);
        double mass = 0.0;
        for (double m : gibbs.measure) mass += m;
        gibbsNorm.record(std::abs(mass - 1.0) - tol::kGibbsNorm, where);

        const TransitionMatrix P(N, beta, gibbs.hamiltonians);
        const MatrixDiagnostics diag = diagnose(P);
        stochastic.record(diag.maxRowSumError - tol::kMatrix, where);
        balance.record(diag.maxDetailedBalanceRelError - tol::kMatrix, where);
        support.record(diag.supportMatchesHypercube ? -1.0 : 1.0, where);

        const SpectralData spectral = spectral_gap(P);
        gapPositive.record(spectral.gap > 0.0 ? -spectral.gap : 1.0, where);

        std::uint32_t ground = 0;
        for (std::uint32_t s = 0; s < P.size(); ++s)
          if (gibbs.hamiltonians[s] < gibbs.hamiltonians[ground]) ground = s;
        for (std::uint32_t sigma : {0U, ground})
          for (double t : {0.0, 1.0, 10.0}) {
            const TvBound b = tv_bound_check(P, sigma, t, spectral.gap);
            tv.record(b.holds() ? (b.trivial ? -1.0 : b.lhs - b.rhs) : 1.0,
                      where + " sigma=" + std::to_string(sigma) + " t=" + format_real(t));
          }

        const PathSet paths =
            build_gamma_N(gibbs.hamiltonians, spec, config.kappa, config.eps, cap);
        const LevelPartition part = partition_levels(spec.p, N);
        const std::uint32_t n = 1U << N;
        long bad = 0, tooLong = 0, badGeometry = 0;
        for (std::uint32_t eta = 0; eta < n; ++eta) {
          for (std::uint32_t ups = 0; ups < n; ++ups) {
            if (eta == ups) continue;
            const Route& r = paths.route({eta}, {ups});
            const Path path = r.expand({eta});
            if (path.back() != Configuration{ups} || !is_self_avoiding(path)) ++bad;
            if (path.length() > N || (r.rule == Rule::Concatenated && path.length() >= N))
              ++tooLong;
            if (r.rule == Rule::Concatenated) {
              const Configuration omega{r.omega};
              const std::uint32_t D = first_level({eta ^ ups}, part);
              const Configuration omegaPrime{r.omega ^ D};
              const int n1 = part.sizes[0];
              const int dEtaOmega = __builtin_popcount(first_level({eta ^ omega.bits}, part));
              const int dPrime = hamming(omegaPrime, {ups});
              const int dPrime1 = __builtin_popcount(first_level({omegaPrime.bits ^ ups}, part));
              const double e = config.eps * n1;
              if (!is_far(dEtaOmega, config.eps, n1) || dPrime != dPrime1 ||
                  dPrime < e - 1e-9 || dPrime > 2 * e + 1e-9)
                ++badGeometry;
            }
          }
        }
        pathsValid.record(bad == 0 ? -1.0 : static_cast<double>(bad), where);
        lengths.record(tooLong == 0 ? -1.0 : static_cast<double>(tooLong), where);
        geometry.record(badGeometry == 0 ? -1.0 : static_cast<double>(badGeometry), where);

        const CongestionResult cong = congestion(P, paths);
        const double inverseGap = 1.0 / spectral.gap;
        poincare.record((inverseGap - cong.rho) / cong.rho - tol::kPoincareRel, where);
        logPoincare.record(spectral.rate - std::log(cong.rho) / N - tol::kLogPoincare, where);
      }
    }
  }

  VerifyReport report;
  for (const Tally* t : {&gibbsNorm, &forms, &thresholds, &projection, &linearMax, &qg, &psi,
                         &stochastic, &balance, &support, &gapPositive, &tv, &pathsValid,
                         &lengths, &geometry, &poincare, &logPoincare})
    report.checks.push_back(t->result());
  return report;
}

}  // namespace grem
