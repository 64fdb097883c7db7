#pragma once

// GREM instance: level partition, seeded hierarchical Gaussian disorder,
// Hamiltonian and exact Gibbs quantities by enumeration.
//
// Spin positions are 0-based. A configuration is a bit pattern where bit i
// set means spin i is +1. Levels occupy consecutive positions starting at
// position 0, so the prefix (sigma_1 ... sigma_j) of a configuration is its
// low `prefix_length(j)` bits.

#include <cstdint>
#include <span>
#include <vector>

namespace grem {

struct ModelSpec {
  int k = 1;
  std::vector<double> p{1.0};
  std::vector<double> a{1.0};
  int N = 1;
  double beta = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless p, a are positive, sum to 1 (1e-12),
  /// have length k, and 1 <= k <= N, beta >= 0.
  void validate() const;
};

/// Checks the proportion/weight pair without a system size.
void validate_weights(std::span<const double> p, std::span<const double> a);

struct LevelPartition {
  std::vector<int> sizes;    // N_1..N_k
  std::vector<int> offsets;  // first position of each level
  bool hasEmptyLevel = false;

  int levels() const { return static_cast<int>(sizes.size()); }
  int total() const { return offsets.empty() ? 0 : offsets.back() + sizes.back(); }
  /// Number of positions in levels 0..level (inclusive).
  int prefix_length(int level) const { return offsets[level] + sizes[level]; }
  /// Level owning spin position `pos`.
  int level_of(int pos) const;
};

LevelPartition partition_levels(std::span<const double> p, int N);

struct Configuration {
  std::uint32_t bits = 0;

  constexpr int spin(int pos) const { return (bits >> pos) & 1U ? +1 : -1; }
  constexpr Configuration flipped(int pos) const { return {bits ^ (1U << pos)}; }
  friend constexpr auto operator<=>(Configuration, Configuration) = default;
};

inline int hamming(Configuration x, Configuration y) {
  return __builtin_popcount(x.bits ^ y.bits);
}

inline std::uint32_t low_mask(int n) {
  return n >= 32 ? ~0U : ((1U << n) - 1U);
}

/// Bits of the first level of `c` (sigma_1).
inline std::uint32_t first_level(Configuration c, const LevelPartition& part) {
  return c.bits & low_mask(part.sizes[0]);
}

/// Standard normal value keyed by (seed, level, prefix); pure function.
double keyed_gaussian(std::uint64_t seed, int level, std::uint64_t prefix);

inline constexpr int kDefaultEnvironmentCap = 22;

class Environment {
 public:
  /// Draws every E^{(j)} as sqrt(N) * keyed_gaussian(seed, j, prefix).
  static Environment sample(const ModelSpec& spec, int maxN = kDefaultEnvironmentCap);
  /// Wraps explicit tables; tables[j] must hold 2^{prefix_length(j)} values.
  static Environment from_tables(LevelPartition partition,
                                 std::vector<std::vector<double>> tables);

  const LevelPartition& partition() const { return partition_; }
  int levels() const { return partition_.levels(); }
  const std::vector<double>& table(int level) const { return tables_[level]; }
  double value(int level, Configuration c) const;

 private:
  LevelPartition partition_;
  std::vector<std::vector<double>> tables_;
};

/// Per-level contributions -sqrt(a_j) E^{(j)}; they sum to the energy.
std::vector<double> level_terms(const Environment& env, std::span<const double> a,
                                Configuration c);

double hamiltonian(const Environment& env, const ModelSpec& spec, Configuration c);

/// Energies of all 2^N configurations indexed by bit pattern.
std::vector<double> all_hamiltonians(const Environment& env, const ModelSpec& spec);

struct GibbsSummary {
  std::vector<double> hamiltonians;
  double logZ = 0.0;
  /// (1/N) log Z, the sign under which it converges to F(beta).
  double finiteVolumeFreeEnergy = 0.0;
  double groundStateEnergy = 0.0;
  std::vector<double> measure;
};

inline constexpr int kDefaultGibbsCap = 14;

/// Gibbs weights from energies with max-shifted normalization.
GibbsSummary gibbs_from_energies(std::vector<double> energies, double beta, int N);

GibbsSummary gibbs_summary(const Environment& env, const ModelSpec& spec,
                           int maxN = kDefaultGibbsCap);

}  // namespace grem
