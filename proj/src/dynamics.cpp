#include "grem/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "grem/errors.hpp"

namespace grem {

namespace {

constexpr double kStationarityDrift = 1e-7;
// exp(-x) is subnormal or zero beyond this.
constexpr double kUnderflowExponent = 700.0;

// One step d -> d P using the hypercube sparsity, then remove the component
// along pi so the stationary direction never accumulates rounding.
void step_deviation(const TransitionMatrix& P, const std::vector<double>& d,
                    std::vector<double>& out) {
  const auto n = static_cast<std::uint32_t>(P.size());
  const auto& pi = P.stationary();
  double mass = 0.0;
  for (std::uint32_t tau = 0; tau < n; ++tau) {
    double acc = d[tau] * (1.0 - P.escape_rate(tau));
    for (int i = 0; i < P.N(); ++i) {
      const std::uint32_t sigma = tau ^ (1U << i);
      acc += d[sigma] * P(sigma, tau);
    }
    out[tau] = acc;
    mass += acc;
  }
  for (std::uint32_t tau = 0; tau < n; ++tau) out[tau] -= mass * pi[tau];
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

// P_t(sigma, .) - pi by uniformization of the deviation e_sigma - pi.
std::vector<double> heat_kernel_deviation(const TransitionMatrix& P, std::uint32_t sigma,
                                          double t, double relTail) {
  const auto& pi = P.stationary();
  std::vector<double> d(pi.size()), next(pi.size());
  for (std::size_t s = 0; s < pi.size(); ++s) d[s] = -pi[s];
  d[sigma] += 1.0;
  if (t == 0.0) return d;
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be nonnegative");

  std::vector<double> acc(pi.size(), 0.0);
  const double logT = std::log(t);
  const long maxTerms = static_cast<long>(t + 60.0 * std::sqrt(t) + 2000.0);
  for (long n = 0; n <= maxTerms; ++n) {
    const double w = std::exp(-t + n * logT - std::lgamma(n + 1.0));
    for (std::size_t s = 0; s < d.size(); ++s) acc[s] += w * d[s];
    if (n + 2 > t) {
      // Poisson tail beyond n is at most w_{n+1} / (1 - t/(n+2)).
      const double wNext = std::exp(-t + (n + 1) * logT - std::lgamma(n + 2.0));
      const double tail = wNext / (1.0 - t / (n + 2.0));
      // |d_n|_1 is nonincreasing, so it bounds every later term.
      if (tail * l1(d) <= relTail * std::max(l1(acc), 1e-300)) return acc;
    }
    step_deviation(P, d, next);
    d.swap(next);
  }
  throw ConvergenceError("uniformization series did not reach its tail bound");
}

}  // namespace

TransitionMatrix::TransitionMatrix(int N, double beta, std::vector<double> hamiltonians)
    : N_(N), beta_(beta), hamiltonians_(std::move(hamiltonians)) {
  if (hamiltonians_.size() != (std::size_t{1} << N))
    throw InvalidArgument("energy table must hold 2^N values");
  stationary_ = gibbs_from_energies(hamiltonians_, beta, N).measure;
  const auto n = static_cast<std::uint32_t>(hamiltonians_.size());
  entries_ = Eigen::MatrixXd::Zero(n, n);
  escape_.assign(n, 0.0);
  const double invN = 1.0 / N;
  for (std::uint32_t s = 0; s < n; ++s) {
    double out = 0.0;
    for (int i = 0; i < N; ++i) {
      const std::uint32_t t = s ^ (1U << i);
      const double uphill = std::max(hamiltonians_[t] - hamiltonians_[s], 0.0);
      const double rate = invN * std::exp(-beta * uphill);
      entries_(s, t) = rate;
      out += rate;
    }
    escape_[s] = out;
    entries_(s, s) = 1.0 - out;
  }
}

int dense_cap(int fallback) {
  int cap = fallback;
  if (const char* env = std::getenv("GREMLAB_MAX_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) cap = static_cast<int>(v);
  }
  return std::min(cap, kHardDenseCap);
}

TransitionMatrix build_transition_matrix(const Environment& env, const ModelSpec& spec,
                                         int maxN) {
  spec.validate();
  if (spec.N > std::min(maxN, kHardDenseCap))
    throw ResourceCapExceeded("transition matrix for N=" + std::to_string(spec.N) +
                              " exceeds dense cap N<=" + std::to_string(maxN));
  return TransitionMatrix(spec.N, spec.beta, all_hamiltonians(env, spec));
}

MatrixDiagnostics diagnose(const TransitionMatrix& P) {
  MatrixDiagnostics diag;
  const auto& M = P.entries();
  const auto& pi = P.stationary();
  const auto n = static_cast<std::uint32_t>(P.size());
  diag.minEntry = M.minCoeff();
  for (std::uint32_t s = 0; s < n; ++s) {
    diag.maxRowSumError = std::max(diag.maxRowSumError, std::abs(M.row(s).sum() - 1.0));
    for (std::uint32_t t = 0; t < n; ++t) {
      if (s == t) continue;
      const bool neighbor = __builtin_popcount(s ^ t) == 1;
      if ((M(s, t) > 0.0) != neighbor) diag.supportMatchesHypercube = false;
      if (!neighbor || t < s) continue;
      const double fwd = pi[s] * M(s, t);
      const double bwd = pi[t] * M(t, s);
      const double scale = std::max(fwd, bwd);
      if (scale > 0.0)
        diag.maxDetailedBalanceRelError =
            std::max(diag.maxDetailedBalanceRelError, std::abs(fwd - bwd) / scale);
    }
  }
  return diag;
}

Eigen::MatrixXd symmetrized_generator(const TransitionMatrix& P) {
  const auto n = static_cast<std::uint32_t>(P.size());
  const auto& h = P.hamiltonians();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const double invN = 1.0 / P.N();
  for (std::uint32_t s = 0; s < n; ++s) {
    L(s, s) = P.escape_rate(s);
    for (int i = 0; i < P.N(); ++i) {
      const std::uint32_t t = s ^ (1U << i);
      // sqrt(pi_s / pi_t) P(s, t) = exp(-beta |H_t - H_s| / 2) / N
      L(s, t) = -invN * std::exp(-0.5 * P.beta() * std::abs(h[t] - h[s]));
    }
  }
  return L;
}

SpectralData spectral_gap(const TransitionMatrix& P) {
  const Eigen::MatrixXd L = symmetrized_generator(P);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("symmetric eigensolver failed");
  const auto& nu = solver.eigenvalues();  // ascending, eigenvalues of I - P
  if (std::abs(nu(0)) > kStationarityDrift)
    throw InconsistencyError("top eigenvalue drifted from 1 by " + std::to_string(nu(0)));

  SpectralData out;
  out.eigenvalues.resize(nu.size());
  for (Eigen::Index i = 0; i < nu.size(); ++i) out.eigenvalues[i] = 1.0 - nu(i);
  if (nu.size() < 2) return out;

  // Refine 1 - mu_1 as the Dirichlet form of the eigenvector after removing
  // the exact stationary direction sqrt(pi); the form is a sum of
  // nonnegative terms, so tiny gaps keep full relative precision.
  const auto& pi = P.stationary();
  Eigen::VectorXd v = solver.eigenvectors().col(1);
  Eigen::VectorXd root(v.size());
  for (Eigen::Index s = 0; s < v.size(); ++s) root(s) = std::sqrt(pi[s]);
  v -= v.dot(root) * root;
  double form = 0.0;
  const auto n = static_cast<std::uint32_t>(P.size());
  for (std::uint32_t s = 0; s < n; ++s) {
    for (int i = 0; i < P.N(); ++i) {
      const std::uint32_t t = s ^ (1U << i);
      if (t < s) continue;
      const double diff = v(s) * std::sqrt(P(s, t)) - v(t) * std::sqrt(P(t, s));
      form += diff * diff;
    }
  }
  out.gap = form / v.squaredNorm();
  out.rate = -std::log(out.gap) / P.N();
  return out;
}

std::vector<double> heat_kernel_row(const TransitionMatrix& P, std::uint32_t sigma,
                                    double t, double relTail) {
  auto row = heat_kernel_deviation(P, sigma, t, relTail);
  const auto& pi = P.stationary();
  for (std::size_t s = 0; s < row.size(); ++s) row[s] += pi[s];
  return row;
}

double total_variation(const std::vector<double>& mu, const std::vector<double>& nu) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return 0.5 * s;
}

TvBound tv_bound_check(const TransitionMatrix& P, std::uint32_t sigma, double t, double gap) {
  TvBound out;
  const double piSigma = P.stationary()[sigma];
  const double exponent = 2.0 * gap * t;
  if (exponent > kUnderflowExponent) {
    out.trivial = true;
    return out;
  }
  const auto dev = heat_kernel_deviation(P, sigma, t, 1e-14);
  const double tv = 0.5 * l1(dev);
  out.lhs = 4.0 * tv * tv;
  out.rhs = (1.0 - piSigma) / piSigma * std::exp(-exponent);
  return out;
}

TvBound tv_bound_check(const TransitionMatrix& P, std::uint32_t sigma, double t) {
  return tv_bound_check(P, sigma, t, spectral_gap(P).gap);
}

}  // namespace grem
