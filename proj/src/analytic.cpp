#include "grem/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "grem/errors.hpp"

namespace grem {

namespace {

constexpr double kFormTolerance = 1e-10;
// Relative slack under which two B values count as a tie.
constexpr double kTieTolerance = 1e-12;

}  // namespace

double beta_star() { return std::sqrt(2.0 * std::numbers::ln2); }

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double block_ratio(std::span<const double> p, std::span<const double> a, int i, int j) {
  double sp = 0.0, sa = 0.0;
  for (int n = i; n <= j; ++n) {
    sp += p[n];
    sa += a[n];
  }
  return beta_star() * std::sqrt(sp / sa);
}

int BlockDecomposition::phase(double beta) const {
  int l = 0;
  while (l < blocks() && betaThresholds[l] <= beta) ++l;
  return l;
}

BlockDecomposition block_decomposition(std::span<const double> p,
                                       std::span<const double> a) {
  validate_weights(p, a);
  const int k = static_cast<int>(p.size());
  BlockDecomposition d;
  d.bTable.assign(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) d.bTable[i][j] = block_ratio(p, a, i, j);

  int start = 0;
  while (start < k) {
    double best = d.bTable[start][start];
    for (int j = start + 1; j < k; ++j) best = std::min(best, d.bTable[start][j]);
    // Among minimizers take the longest block; with the shortest one, equal
    // thresholds would appear whenever B(start, .) is flat.
    int end = start;
    for (int j = start; j < k; ++j) {
      if (d.bTable[start][j] <= best * (1.0 + kTieTolerance)) end = j;
    }
    d.jStars.push_back(end + 1);
    d.betaThresholds.push_back(d.bTable[start][end]);
    start = end + 1;
  }
  return d;
}

EquilibriumVectors equilibrium_vectors(const BlockDecomposition& decomp,
                                       std::span<const double> a, double beta) {
  const int k = static_cast<int>(a.size());
  EquilibriumVectors v;
  v.phaseIndex = decomp.phase(beta);
  v.mStar.resize(k);
  v.wOfBeta.resize(k);
  v.wStar.resize(k);
  for (int j = 0; j < k; ++j) v.mStar[j] = beta * std::sqrt(a[j]);
  for (int l = 0; l < decomp.blocks(); ++l) {
    for (int j = decomp.blockStart(l); j < decomp.blockEnd(l); ++j) {
      v.wStar[j] = decomp.betaThresholds[l] * std::sqrt(a[j]);
      v.wOfBeta[j] = l < v.phaseIndex ? v.wStar[j] : v.mStar[j];
    }
  }
  return v;
}

double free_energy_in_phase(const BlockDecomposition& decomp, std::span<const double> p,
                            std::span<const double> a, double beta, int phase) {
  const double bs2 = beta_star() * beta_star();
  double frozen = 0.0;
  for (int l = 0; l < phase; ++l) {
    double blockWeight = 0.0;
    for (int j = decomp.blockStart(l); j < decomp.blockEnd(l); ++j) blockWeight += a[j];
    frozen += decomp.betaThresholds[l] * blockWeight;
  }
  double tail = 0.0;
  const int first = phase == 0 ? 0 : decomp.blockEnd(phase - 1);
  for (int j = first; j < static_cast<int>(p.size()); ++j)
    tail += bs2 * p[j] + beta * beta * a[j];
  return beta * frozen + 0.5 * tail;
}

double free_energy(const EquilibriumVectors& vectors, const BlockDecomposition& decomp,
                   std::span<const double> p, std::span<const double> a, double beta) {
  const auto& m = vectors.mStar;
  const auto& w = vectors.wOfBeta;
  double dist2 = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) dist2 += (m[j] - w[j]) * (m[j] - w[j]);
  const double F = 0.5 * (beta_star() * beta_star() + dot(m, m) - dist2);
  const double explicitSum = free_energy_in_phase(decomp, p, a, beta, vectors.phaseIndex);
  if (std::abs(F - explicitSum) > kFormTolerance)
    throw InconsistencyError("free energy forms disagree: " + std::to_string(F) +
                             " vs " + std::to_string(explicitSum));
  return F;
}

FreeEnergyProfile free_energy_profile(const BlockDecomposition& decomp,
                                      std::span<const double> p,
                                      std::span<const double> a, double beta) {
  auto v = equilibrium_vectors(decomp, a, beta);
  FreeEnergyProfile prof;
  prof.F = free_energy(v, decomp, p, a, beta);
  prof.bound = dot(v.mStar, v.wStar);
  prof.phaseIndex = v.phaseIndex;
  prof.mStar = std::move(v.mStar);
  prof.wOfBeta = std::move(v.wOfBeta);
  prof.wStar = std::move(v.wStar);
  return prof;
}

double theorem_bound(const FreeEnergyProfile& profile) {
  return dot(profile.mStar, profile.wStar);
}

}  // namespace grem
