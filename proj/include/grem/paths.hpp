#pragma once

// Canonical paths on the hypercube: the flip-order families gamma^i, the
// near/far routing rules that assemble a complete path set Gamma_N, and the
// congestion of that set under the Metropolis chain.
//
// Positions and path superscripts are 0-based: superscript i flips the
// disagreeing positions >= i in increasing order, then those < i.

#include <cstdint>
#include <vector>

#include "grem/dynamics.hpp"
#include "grem/model.hpp"

namespace grem {

struct Path {
  std::vector<Configuration> vertices;

  int length() const { return static_cast<int>(vertices.size()) - 1; }
  Configuration front() const { return vertices.front(); }
  Configuration back() const { return vertices.back(); }
  /// Vertices other than the two endpoints.
  std::vector<Configuration> interior() const;
};

/// Order in which gamma^start flips the positions where eta and upsilon disagree.
std::vector<int> flip_order(Configuration eta, Configuration upsilon, int start, int N);

Path path_from_flips(Configuration from, const std::vector<int>& flips);

Path gamma_i_path(Configuration eta, Configuration upsilon, int start, int N);

bool is_self_avoiding(const Path& path);

/// gamma^{i_1}, ..., gamma^{i_n} for the first-level disagreements i_1 < ... < i_n.
/// Requires n >= 2.
std::vector<Path> independent_family(Configuration eta, Configuration upsilon,
                                     const LevelPartition& part);

/// True when every interior vertex of each path differs at level 1 from
/// every interior vertex of every other path.
bool pairwise_independent(const std::vector<Path>& family, const LevelPartition& part);

/// ceil(eps * n) with a 1e-9 guard against representation error.
int ceil_fraction(double eps, int n);
/// floor(eps * n), same guard.
int floor_fraction(double eps, int n);
/// d1 >= eps * n1, i.e. the pair is routed by the direct rule.
bool is_far(int d1, double eps, int n1);

/// Sigma_N^{eta,upsilon}: level 1 agrees with eta on the first-level
/// disagreement set D and differs from eta at exactly ceil(eps N_1) other
/// positions; higher levels copy upsilon. Ascending bit-pattern order.
std::vector<Configuration> intermediate_candidates(Configuration eta, Configuration upsilon,
                                                   double eps, const LevelPartition& part);

class EdgeClassification {
 public:
  EdgeClassification(const std::vector<double>& hamiltonians, double kappa, int N);

  double kappa() const { return kappa_; }
  bool good(Configuration c) const { return good_[c.bits] != 0; }
  bool good_edge(Configuration x, Configuration y) const { return good(x) && good(y); }
  std::size_t good_count() const;
  /// All interior edges good; paths with fewer than three edges have none.
  bool good_path(const Path& path) const;

 private:
  double kappa_;
  std::vector<std::uint8_t> good_;
};

enum class Rule : std::uint8_t { DirectFirstGood, DirectFallback, Concatenated, NearFallback };

const char* rule_name(Rule rule);

/// Compact record of one routed path: up to 16 flip positions, 4 bits each.
struct Route {
  std::uint64_t flips = 0;
  std::uint8_t length = 0;
  Rule rule = Rule::DirectFallback;
  bool good = false;
  std::uint8_t superscript = 0;        // first leg (or the only leg)
  std::uint8_t secondSuperscript = 0;  // last leg of a concatenation
  std::uint32_t omega = 0;             // intermediate point of a concatenation

  int flip(int n) const { return static_cast<int>((flips >> (4 * n)) & 0xF); }
  Path expand(Configuration from) const;
};

class GammaBuilder {
 public:
  GammaBuilder(LevelPartition part, const EdgeClassification& classification, double eps);

  int N() const { return N_; }
  Route route(Configuration eta, Configuration upsilon) const;

 private:
  Route direct(Configuration eta, Configuration upsilon, Rule fallbackRule) const;
  bool try_concatenate(Configuration eta, Configuration upsilon, Route& out) const;

  LevelPartition part_;
  const EdgeClassification* classification_;
  double eps_;
  int N_;
};

struct RuleCounts {
  std::size_t directFirstGood = 0;
  std::size_t directFallback = 0;
  std::size_t concatenated = 0;
  std::size_t nearFallback = 0;

  void add(Rule rule);
  RuleCounts& operator+=(const RuleCounts& other);
};

inline constexpr int kDefaultPathCap = 12;

class PathSet {
 public:
  PathSet(int N, std::vector<Route> routes);

  int N() const { return N_; }
  const Route& route(Configuration eta, Configuration upsilon) const {
    return routes_[(static_cast<std::size_t>(eta.bits) << N_) | upsilon.bits];
  }
  Path path(Configuration eta, Configuration upsilon) const {
    return route(eta, upsilon).expand(eta);
  }
  int maxLength() const { return maxLength_; }
  const RuleCounts& ruleCounts() const { return counts_; }
  /// Fraction of ordered distinct pairs whose path is good.
  double goodFraction() const { return goodFraction_; }
  bool allGood() const { return goodPairs_ == pairCount(); }
  std::size_t pairCount() const { return (std::size_t{1} << N_) * ((std::size_t{1} << N_) - 1); }

 private:
  int N_;
  std::vector<Route> routes_;
  int maxLength_ = 0;
  RuleCounts counts_;
  std::size_t goodPairs_ = 0;
  double goodFraction_ = 0.0;
};

PathSet build_gamma_N(const std::vector<double>& hamiltonians, const ModelSpec& spec,
                      double kappa, double eps, int maxN = kDefaultPathCap);

PathSet build_gamma_N(const Environment& env, const ModelSpec& spec, double kappa,
                      double eps, int maxN = kDefaultPathCap);

/// Whether every path of Gamma_N is good, without storing the set; stops at
/// the first bad path.
bool gamma_N_all_good(const std::vector<double>& hamiltonians, const ModelSpec& spec,
                      double kappa, double eps, int maxN = kDefaultPathCap);

struct CongestionResult {
  double rho = 0.0;
  std::uint32_t edgeFrom = 0;
  std::uint32_t edgeTo = 0;
  int maxLength = 0;
};

/// Maximum over directed edges (s, t) of
///   maxLength / (pi(s) P(s, t)) * sum_{paths through s->t} pi(eta) pi(upsilon).
CongestionResult congestion(const TransitionMatrix& P, const PathSet& paths);

}  // namespace grem
