#pragma once

// Closed-form equilibrium theory of the GREM: the block decomposition of
// the levels, freezing thresholds, the vectors m*, w(beta), w*, and the
// limiting free energy F(beta).
//
// Levels are 0-based here. A block is a half-open level range
// [blockStart(l), blockEnd(l)); block l freezes at betaThresholds[l].

#include <span>
#include <vector>

#include "grem/model.hpp"

namespace grem {

/// sqrt(2 log 2).
double beta_star();

struct BlockDecomposition {
  /// Exclusive end level of each block (1-based J*_l); strictly increasing, last is k.
  std::vector<int> jStars;
  /// beta_l for each block, strictly increasing.
  std::vector<double> betaThresholds;
  /// bTable[i][j] = B(i, j) for 0 <= i <= j < k (zero below the diagonal).
  std::vector<std::vector<double>> bTable;

  int blocks() const { return static_cast<int>(jStars.size()); }
  int blockStart(int l) const { return l == 0 ? 0 : jStars[l - 1]; }
  int blockEnd(int l) const { return jStars[l]; }
  /// Number of frozen blocks at inverse temperature beta (beta_l <= beta).
  int phase(double beta) const;
};

/// B(i, j) = beta* sqrt((p_i + ... + p_j) / (a_i + ... + a_j)), 0-based inclusive.
double block_ratio(std::span<const double> p, std::span<const double> a, int i, int j);

BlockDecomposition block_decomposition(std::span<const double> p, std::span<const double> a);

struct EquilibriumVectors {
  std::vector<double> mStar;
  std::vector<double> wOfBeta;
  std::vector<double> wStar;
  int phaseIndex = 0;
};

EquilibriumVectors equilibrium_vectors(const BlockDecomposition& decomp,
                                       std::span<const double> a, double beta);

struct FreeEnergyProfile {
  std::vector<double> mStar;
  std::vector<double> wOfBeta;
  std::vector<double> wStar;
  double F = 0.0;
  double bound = 0.0;
  int phaseIndex = 0;
};

/// Explicit-sum form of F evaluated as if beta were in phase `phase`.
/// Used to compare the one-sided limits at a threshold.
double free_energy_in_phase(const BlockDecomposition& decomp, std::span<const double> p,
                            std::span<const double> a, double beta, int phase);

/// F(beta) from the distance form 1/2 (beta*^2 + |m*|^2 - |m* - w|^2).
/// Throws InconsistencyError if the explicit-sum form disagrees beyond 1e-10.
double free_energy(const EquilibriumVectors& vectors, const BlockDecomposition& decomp,
                   std::span<const double> p, std::span<const double> a, double beta);

FreeEnergyProfile free_energy_profile(const BlockDecomposition& decomp,
                                      std::span<const double> p,
                                      std::span<const double> a, double beta);

inline FreeEnergyProfile free_energy_profile(const BlockDecomposition& decomp,
                                             const ModelSpec& spec) {
  return free_energy_profile(decomp, spec.p, spec.a, spec.beta);
}

/// <m*, w*>, the exponential rate bound on 1/gap.
double theorem_bound(const FreeEnergyProfile& profile);

double dot(std::span<const double> x, std::span<const double> y);

}  // namespace grem
