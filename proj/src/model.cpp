#include "grem/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "grem/errors.hpp"

namespace grem {

namespace {

constexpr double kSumTolerance = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 53-bit uniform in (0, 1].
double to_unit_open(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

void validate_weights(std::span<const double> p, std::span<const double> a) {
  if (p.empty()) throw InvalidArgument("at least one level is required");
  if (p.size() != a.size())
    throw InvalidArgument("p and a must have the same length");
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > 0.0) || !(a[j] > 0.0))
      throw InvalidArgument("level proportions and weights must be positive");
  }
  const double sp = std::accumulate(p.begin(), p.end(), 0.0);
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  if (std::abs(sp - 1.0) > kSumTolerance) throw InvalidArgument("p must sum to 1");
  if (std::abs(sa - 1.0) > kSumTolerance) throw InvalidArgument("a must sum to 1");
}

void ModelSpec::validate() const {
  if (k < 1) throw InvalidArgument("k must be positive");
  if (static_cast<int>(p.size()) != k || static_cast<int>(a.size()) != k)
    throw InvalidArgument("p and a must have k entries");
  validate_weights(p, a);
  if (N < k) throw InvalidArgument("N must be at least k");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InvalidArgument("beta must be a finite nonnegative number");
}

int LevelPartition::level_of(int pos) const {
  for (int j = levels() - 1; j >= 0; --j) {
    if (sizes[j] > 0 && pos >= offsets[j]) return j;
  }
  return 0;
}

LevelPartition partition_levels(std::span<const double> p, int N) {
  const int k = static_cast<int>(p.size());
  if (k < 1) throw InvalidArgument("at least one level is required");
  if (N < k) throw InvalidArgument("N must be at least k (N=" + std::to_string(N) +
                                   ", k=" + std::to_string(k) + ")");
  LevelPartition part;
  part.sizes.resize(k);
  part.offsets.resize(k);
  int used = 0;
  for (int j = 0; j < k; ++j) {
    part.offsets[j] = used;
    part.sizes[j] = (j + 1 < k) ? static_cast<int>(std::floor(p[j] * N)) : N - used;
    used += part.sizes[j];
  }
  part.hasEmptyLevel =
      std::any_of(part.sizes.begin(), part.sizes.end(), [](int n) { return n == 0; });
  return part;
}

double keyed_gaussian(std::uint64_t seed, int level, std::uint64_t prefix) {
  // Counter-based: the draw depends only on the key, never on call order.
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(level) + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ prefix);
  const double u1 = to_unit_open(h);
  const double u2 = to_unit_open(splitmix64(h ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Environment Environment::sample(const ModelSpec& spec, int maxN) {
  spec.validate();
  if (spec.N > maxN)
    throw ResourceCapExceeded("environment for N=" + std::to_string(spec.N) +
                              " exceeds cap N<=" + std::to_string(maxN));
  Environment env;
  env.partition_ = partition_levels(spec.p, spec.N);
  const double scale = std::sqrt(static_cast<double>(spec.N));
  env.tables_.resize(spec.k);
  for (int j = 0; j < spec.k; ++j) {
    const std::size_t count = std::size_t{1} << env.partition_.prefix_length(j);
    auto& table = env.tables_[j];
    table.resize(count);
    for (std::size_t prefix = 0; prefix < count; ++prefix)
      table[prefix] = scale * keyed_gaussian(spec.seed, j, prefix);
  }
  return env;
}

Environment Environment::from_tables(LevelPartition partition,
                                     std::vector<std::vector<double>> tables) {
  if (static_cast<int>(tables.size()) != partition.levels())
    throw InvalidArgument("one table per level is required");
  for (int j = 0; j < partition.levels(); ++j) {
    if (tables[j].size() != (std::size_t{1} << partition.prefix_length(j)))
      throw InvalidArgument("table size must be 2^(prefix length) at level " +
                            std::to_string(j));
  }
  Environment env;
  env.partition_ = std::move(partition);
  env.tables_ = std::move(tables);
  return env;
}

double Environment::value(int level, Configuration c) const {
  return tables_[level][c.bits & low_mask(partition_.prefix_length(level))];
}

std::vector<double> level_terms(const Environment& env, std::span<const double> a,
                                Configuration c) {
  std::vector<double> terms(env.levels());
  for (int j = 0; j < env.levels(); ++j) terms[j] = -std::sqrt(a[j]) * env.value(j, c);
  return terms;
}

double hamiltonian(const Environment& env, const ModelSpec& spec, Configuration c) {
  double h = 0.0;
  for (int j = 0; j < env.levels(); ++j) h -= std::sqrt(spec.a[j]) * env.value(j, c);
  return h;
}

std::vector<double> all_hamiltonians(const Environment& env, const ModelSpec& spec) {
  const std::uint32_t count = 1U << spec.N;
  std::vector<double> energies(count);
  for (std::uint32_t s = 0; s < count; ++s) energies[s] = hamiltonian(env, spec, {s});
  return energies;
}

GibbsSummary gibbs_from_energies(std::vector<double> energies, double beta, int N) {
  GibbsSummary g;
  g.hamiltonians = std::move(energies);
  const auto& h = g.hamiltonians;
  g.groundStateEnergy = *std::min_element(h.begin(), h.end());
  // -beta*H is largest at the ground state.
  const double shift = -beta * g.groundStateEnergy;
  g.measure.resize(h.size());
  double total = 0.0;
  for (std::size_t s = 0; s < h.size(); ++s) {
    g.measure[s] = std::exp(-beta * h[s] - shift);
    total += g.measure[s];
  }
  for (double& m : g.measure) m /= total;
  g.logZ = shift + std::log(total);
  g.finiteVolumeFreeEnergy = g.logZ / N;
  return g;
}

GibbsSummary gibbs_summary(const Environment& env, const ModelSpec& spec, int maxN) {
  spec.validate();
  if (spec.N > maxN)
    throw ResourceCapExceeded("Gibbs enumeration for N=" + std::to_string(spec.N) +
                              " exceeds cap N<=" + std::to_string(maxN));
  return gibbs_from_energies(all_hamiltonians(env, spec), spec.beta, spec.N);
}

}  // namespace grem
