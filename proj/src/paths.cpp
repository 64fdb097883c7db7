#include "grem/paths.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <string>

#include "grem/errors.hpp"
#include "grem/parallel.hpp"

namespace grem {

namespace {

constexpr double kFractionGuard = 1e-9;
constexpr std::size_t kChunks = 64;
constexpr int kMaxPackedLength = 16;

using FlipBuffer = std::array<int, kMaxPackedLength>;

// Disagreeing positions of x and y in increasing order; returns the count.
int disagreements(std::uint32_t diff, FlipBuffer& out) {
  int n = 0;
  while (diff != 0) {
    out[n++] = __builtin_ctz(diff);
    diff &= diff - 1;
  }
  return n;
}

// Rotation of the ascending disagreement list that starts at index c.
void rotated(const FlipBuffer& positions, int count, int c, int* out) {
  for (int n = 0; n < count; ++n) out[n] = positions[(c + n) % count];
}

// Smallest superscript whose path starts at disagreement index c.
int smallest_superscript(const FlipBuffer& positions, int c) {
  return c == 0 ? 0 : positions[c - 1] + 1;
}

// Vertices v_1..v_{len-1} are good; shorter paths have no interior edges.
bool interior_good(Configuration from, const int* flips, int len,
                   const EdgeClassification& cls) {
  if (len < 3) return true;
  Configuration v = from;
  for (int n = 0; n + 1 < len; ++n) {
    v = v.flipped(flips[n]);
    if (!cls.good(v)) return false;
  }
  return true;
}

Route pack(const int* flips, int len) {
  Route r;
  for (int n = 0; n < len; ++n) r.flips |= static_cast<std::uint64_t>(flips[n]) << (4 * n);
  r.length = static_cast<std::uint8_t>(len);
  return r;
}

}  // namespace

std::vector<Configuration> Path::interior() const {
  if (vertices.size() <= 2) return {};
  return {vertices.begin() + 1, vertices.end() - 1};
}

std::vector<int> flip_order(Configuration eta, Configuration upsilon, int start, int N) {
  if (eta == upsilon) throw InvalidArgument("gamma^i needs distinct endpoints");
  if (start < 0 || start >= N) throw InvalidArgument("superscript must lie in 0..N-1");
  std::vector<int> order;
  const std::uint32_t diff = eta.bits ^ upsilon.bits;
  for (int pos = start; pos < N; ++pos)
    if ((diff >> pos) & 1U) order.push_back(pos);
  for (int pos = 0; pos < start; ++pos)
    if ((diff >> pos) & 1U) order.push_back(pos);
  return order;
}

Path path_from_flips(Configuration from, const std::vector<int>& flips) {
  Path p;
  p.vertices.reserve(flips.size() + 1);
  p.vertices.push_back(from);
  for (int pos : flips) p.vertices.push_back(p.vertices.back().flipped(pos));
  return p;
}

Path gamma_i_path(Configuration eta, Configuration upsilon, int start, int N) {
  return path_from_flips(eta, flip_order(eta, upsilon, start, N));
}

bool is_self_avoiding(const Path& path) {
  auto v = path.vertices;
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

std::vector<Path> independent_family(Configuration eta, Configuration upsilon,
                                     const LevelPartition& part) {
  const std::uint32_t d1 = first_level({eta.bits ^ upsilon.bits}, part);
  if (__builtin_popcount(d1) < 2)
    throw InvalidArgument("independent family needs at least two first-level disagreements");
  std::vector<Path> family;
  for (int pos = 0; pos < part.sizes[0]; ++pos)
    if ((d1 >> pos) & 1U) family.push_back(gamma_i_path(eta, upsilon, pos, part.total()));
  return family;
}

bool pairwise_independent(const std::vector<Path>& family, const LevelPartition& part) {
  for (std::size_t x = 0; x < family.size(); ++x) {
    const auto ix = family[x].interior();
    for (std::size_t y = x + 1; y < family.size(); ++y) {
      for (Configuration s : ix)
        for (Configuration t : family[y].interior())
          if (first_level(s, part) == first_level(t, part)) return false;
    }
  }
  return true;
}

int ceil_fraction(double eps, int n) {
  return static_cast<int>(std::ceil(eps * n - kFractionGuard));
}

int floor_fraction(double eps, int n) {
  return static_cast<int>(std::floor(eps * n + kFractionGuard));
}

bool is_far(int d1, double eps, int n1) { return d1 >= eps * n1 - kFractionGuard; }

std::vector<Configuration> intermediate_candidates(Configuration eta, Configuration upsilon,
                                                   double eps, const LevelPartition& part) {
  const int n1 = part.sizes[0];
  const std::uint32_t levelMask = low_mask(n1);
  const std::uint32_t D = (eta.bits ^ upsilon.bits) & levelMask;
  if (is_far(__builtin_popcount(D), eps, n1))
    throw InvalidArgument("intermediate candidates are defined for near pairs only");
  const int m = ceil_fraction(eps, n1);
  std::vector<Configuration> out;
  for (std::uint32_t S = 0; S <= levelMask; ++S) {
    if ((S & D) != 0 || __builtin_popcount(S) != m) continue;
    out.push_back({((eta.bits ^ S) & levelMask) | (upsilon.bits & ~levelMask)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

EdgeClassification::EdgeClassification(const std::vector<double>& hamiltonians,
                                       double kappa, int N)
    : kappa_(kappa), good_(hamiltonians.size()) {
  for (std::size_t s = 0; s < hamiltonians.size(); ++s)
    good_[s] = hamiltonians[s] <= kappa * N ? 1 : 0;
}

std::size_t EdgeClassification::good_count() const {
  return static_cast<std::size_t>(std::count(good_.begin(), good_.end(), 1));
}

bool EdgeClassification::good_path(const Path& path) const {
  if (path.length() < 3) return true;
  for (std::size_t n = 1; n + 1 < path.vertices.size(); ++n)
    if (!good(path.vertices[n])) return false;
  return true;
}

const char* rule_name(Rule rule) {
  switch (rule) {
    case Rule::DirectFirstGood: return "rule1_direct";
    case Rule::DirectFallback: return "rule1_fallback";
    case Rule::Concatenated: return "rule2_concat";
    case Rule::NearFallback: return "rule2_fallback";
  }
  return "unknown";
}

Path Route::expand(Configuration from) const {
  Path p;
  p.vertices.reserve(length + 1);
  p.vertices.push_back(from);
  for (int n = 0; n < length; ++n) p.vertices.push_back(p.vertices.back().flipped(flip(n)));
  return p;
}

GammaBuilder::GammaBuilder(LevelPartition part, const EdgeClassification& classification,
                           double eps)
    : part_(std::move(part)), classification_(&classification), eps_(eps), N_(part_.total()) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");
  if (N_ > kMaxPackedLength - 1) throw InvalidArgument("paths support N <= 15");
}

Route GammaBuilder::direct(Configuration eta, Configuration upsilon, Rule fallbackRule) const {
  FlipBuffer positions{};
  const int r = disagreements(eta.bits ^ upsilon.bits, positions);
  int flips[kMaxPackedLength];
  if (fallbackRule == Rule::DirectFallback) {
    for (int c = 0; c < r; ++c) {
      rotated(positions, r, c, flips);
      if (interior_good(eta, flips, r, *classification_)) {
        Route out = pack(flips, r);
        out.rule = Rule::DirectFirstGood;
        out.good = true;
        out.superscript = static_cast<std::uint8_t>(smallest_superscript(positions, c));
        return out;
      }
    }
  }
  rotated(positions, r, 0, flips);
  Route out = pack(flips, r);
  out.rule = fallbackRule;
  out.good = interior_good(eta, flips, r, *classification_);
  return out;
}

bool GammaBuilder::try_concatenate(Configuration eta, Configuration upsilon,
                                   Route& out) const {
  const auto& cls = *classification_;
  const std::uint32_t D = first_level({eta.bits ^ upsilon.bits}, part_);
  FlipBuffer connector{};
  const int dLen = disagreements(D, connector);

  for (Configuration omega : intermediate_candidates(eta, upsilon, eps_, part_)) {
    const Configuration omegaPrime{omega.bits ^ D};
    FlipBuffer legA{}, legB{};
    const int aLen = disagreements(eta.bits ^ omega.bits, legA);
    const int bLen = disagreements(omegaPrime.bits ^ upsilon.bits, legB);
    const int total = aLen + dLen + bLen;
    if (total >= N_) return false;  // same length for every candidate
    const bool needGood = total >= 3;

    // omega .. omega' are interior vertices of any concatenation.
    if (needGood) {
      Configuration v = omega;
      bool ok = cls.good(v);
      for (int n = 0; ok && n < dLen; ++n) {
        v = v.flipped(connector[n]);
        ok = cls.good(v);
      }
      if (!ok) continue;
    }

    int flips[kMaxPackedLength];
    for (int ca = 0; ca < aLen; ++ca) {
      rotated(legA, aLen, ca, flips);
      if (needGood) {
        Configuration v = eta;
        bool ok = true;
        for (int n = 0; ok && n + 1 < aLen; ++n) {
          v = v.flipped(flips[n]);
          ok = cls.good(v);
        }
        if (!ok) continue;
      }
      for (int n = 0; n < dLen; ++n) flips[aLen + n] = connector[n];
      for (int cb = 0; cb < bLen; ++cb) {
        rotated(legB, bLen, cb, flips + aLen + dLen);
        if (needGood) {
          Configuration v = omegaPrime;
          bool ok = true;
          for (int n = 0; ok && n + 1 < bLen; ++n) {
            v = v.flipped(flips[aLen + dLen + n]);
            ok = cls.good(v);
          }
          if (!ok) continue;
        }
        std::array<std::uint32_t, kMaxPackedLength + 1> seen{};
        Configuration v = eta;
        seen[0] = v.bits;
        for (int n = 0; n < total; ++n) {
          v = v.flipped(flips[n]);
          seen[n + 1] = v.bits;
        }
        std::sort(seen.begin(), seen.begin() + total + 1);
        if (std::adjacent_find(seen.begin(), seen.begin() + total + 1) !=
            seen.begin() + total + 1)
          continue;
        out = pack(flips, total);
        out.rule = Rule::Concatenated;
        out.good = true;
        out.superscript = static_cast<std::uint8_t>(smallest_superscript(legA, ca));
        out.secondSuperscript = static_cast<std::uint8_t>(smallest_superscript(legB, cb));
        out.omega = omega.bits;
        return true;
      }
    }
  }
  return false;
}

Route GammaBuilder::route(Configuration eta, Configuration upsilon) const {
  if (eta == upsilon) {
    Route r;
    r.rule = Rule::DirectFirstGood;
    r.good = true;
    return r;
  }
  const int d1 = __builtin_popcount(first_level({eta.bits ^ upsilon.bits}, part_));
  if (is_far(d1, eps_, part_.sizes[0])) return direct(eta, upsilon, Rule::DirectFallback);
  Route out;
  if (try_concatenate(eta, upsilon, out)) return out;
  return direct(eta, upsilon, Rule::NearFallback);
}

void RuleCounts::add(Rule rule) {
  switch (rule) {
    case Rule::DirectFirstGood: ++directFirstGood; break;
    case Rule::DirectFallback: ++directFallback; break;
    case Rule::Concatenated: ++concatenated; break;
    case Rule::NearFallback: ++nearFallback; break;
  }
}

RuleCounts& RuleCounts::operator+=(const RuleCounts& other) {
  directFirstGood += other.directFirstGood;
  directFallback += other.directFallback;
  concatenated += other.concatenated;
  nearFallback += other.nearFallback;
  return *this;
}

PathSet::PathSet(int N, std::vector<Route> routes) : N_(N), routes_(std::move(routes)) {
  const std::uint32_t n = 1U << N;
  for (std::uint32_t eta = 0; eta < n; ++eta) {
    for (std::uint32_t ups = 0; ups < n; ++ups) {
      if (eta == ups) continue;
      const Route& r = route({eta}, {ups});
      maxLength_ = std::max<int>(maxLength_, r.length);
      counts_.add(r.rule);
      if (r.good) ++goodPairs_;
    }
  }
  goodFraction_ = pairCount() == 0 ? 1.0 : static_cast<double>(goodPairs_) / pairCount();
}

namespace {

void check_path_cap(const ModelSpec& spec, int maxN) {
  spec.validate();
  if (spec.N > maxN)
    throw ResourceCapExceeded("path set for N=" + std::to_string(spec.N) +
                              " exceeds cap N<=" + std::to_string(maxN));
}

}  // namespace

PathSet build_gamma_N(const std::vector<double>& hamiltonians, const ModelSpec& spec,
                      double kappa, double eps, int maxN) {
  check_path_cap(spec, maxN);
  if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be nonnegative");
  const EdgeClassification cls(hamiltonians, kappa, spec.N);
  const GammaBuilder builder(partition_levels(spec.p, spec.N), cls, eps);
  const std::size_t n = std::size_t{1} << spec.N;
  std::vector<Route> routes(n * n);
  parallel_chunks(kChunks, [&](std::size_t chunk) {
    const auto [begin, end] = chunk_range(n, kChunks, chunk);
    for (std::size_t eta = begin; eta < end; ++eta)
      for (std::size_t ups = 0; ups < n; ++ups)
        routes[(eta << spec.N) | ups] = builder.route(
            {static_cast<std::uint32_t>(eta)}, {static_cast<std::uint32_t>(ups)});
  });
  return PathSet(spec.N, std::move(routes));
}

PathSet build_gamma_N(const Environment& env, const ModelSpec& spec, double kappa,
                      double eps, int maxN) {
  check_path_cap(spec, maxN);
  return build_gamma_N(all_hamiltonians(env, spec), spec, kappa, eps, maxN);
}

bool gamma_N_all_good(const std::vector<double>& hamiltonians, const ModelSpec& spec,
                      double kappa, double eps, int maxN) {
  check_path_cap(spec, maxN);
  const EdgeClassification cls(hamiltonians, kappa, spec.N);
  const GammaBuilder builder(partition_levels(spec.p, spec.N), cls, eps);
  const std::size_t n = std::size_t{1} << spec.N;
  std::atomic<bool> allGood{true};
  parallel_chunks(kChunks, [&](std::size_t chunk) {
    const auto [begin, end] = chunk_range(n, kChunks, chunk);
    for (std::size_t eta = begin; eta < end && allGood.load(std::memory_order_relaxed); ++eta)
      for (std::size_t ups = 0; ups < n; ++ups)
        if (!builder.route({static_cast<std::uint32_t>(eta)}, {static_cast<std::uint32_t>(ups)})
                 .good) {
          allGood = false;
          return;
        }
  });
  return allGood;
}

CongestionResult congestion(const TransitionMatrix& P, const PathSet& paths) {
  if (P.N() != paths.N()) throw InvalidArgument("matrix and path set sizes differ");
  const int N = P.N();
  const std::size_t n = std::size_t{1} << N;
  const auto& pi = P.stationary();

  // Directed edge (s -> s with bit i flipped) has index s * N + i.
  std::vector<std::vector<double>> partial(kChunks);
  parallel_chunks(kChunks, [&](std::size_t chunk) {
    auto& load = partial[chunk];
    load.assign(n * N, 0.0);
    const auto [begin, end] = chunk_range(n, kChunks, chunk);
    for (std::size_t eta = begin; eta < end; ++eta) {
      for (std::size_t ups = 0; ups < n; ++ups) {
        if (eta == ups) continue;
        const Route& r = paths.route({static_cast<std::uint32_t>(eta)},
                                     {static_cast<std::uint32_t>(ups)});
        const double weight = pi[eta] * pi[ups];
        std::size_t v = eta;
        for (int step = 0; step < r.length; ++step) {
          const int pos = r.flip(step);
          load[v * N + pos] += weight;
          v ^= std::size_t{1} << pos;
        }
      }
    }
  });
  std::vector<double> load(n * N, 0.0);
  for (const auto& part : partial)
    for (std::size_t e = 0; e < load.size(); ++e) load[e] += part[e];

  CongestionResult out;
  out.maxLength = paths.maxLength();
  for (std::size_t s = 0; s < n; ++s) {
    for (int i = 0; i < N; ++i) {
      const double l = load[s * N + i];
      if (l == 0.0) continue;
      const auto t = static_cast<std::uint32_t>(s ^ (std::size_t{1} << i));
      const double flow = pi[s] * P(static_cast<std::uint32_t>(s), t);
      if (!(flow > 0.0))
        throw InconsistencyError("a path uses a transition with zero probability");
      const double value = out.maxLength * l / flow;
      if (value > out.rho) {
        out.rho = value;
        out.edgeFrom = static_cast<std::uint32_t>(s);
        out.edgeTo = t;
      }
    }
  }
  return out;
}

}  // namespace grem
