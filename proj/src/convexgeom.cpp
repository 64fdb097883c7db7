#include "grem/convexgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "grem/errors.hpp"

namespace grem {

NestedBallSet::NestedBallSet(std::vector<double> radiiSq) : radiiSq_(std::move(radiiSq)) {
  for (double r : radiiSq_) {
    if (!(r >= 0.0)) throw InvalidArgument("squared radii must be nonnegative");
  }
  for (int m = dim() - 2; m >= 0; --m) radiiSq_[m] = std::min(radiiSq_[m], radiiSq_[m + 1]);
}

double NestedBallSet::violation(std::span<const double> x) const {
  double worst = -std::numeric_limits<double>::infinity();
  double prefix = 0.0;
  for (int m = 0; m < dim(); ++m) {
    prefix += x[m] * x[m];
    worst = std::max(worst, prefix - radiiSq_[m]);
  }
  return worst;
}

bool NestedBallSet::contains(std::span<const double> x, double tol) const {
  return violation(x) <= tol;
}

void NestedBallSet::project_onto_constraint(int m, std::span<double> x) const {
  double norm2 = 0.0;
  for (int i = 0; i <= m; ++i) norm2 += x[i] * x[i];
  if (norm2 <= radiiSq_[m]) return;
  const double scale = std::sqrt(radiiSq_[m] / norm2);
  for (int i = 0; i <= m; ++i) x[i] *= scale;
}

std::vector<double> project(const NestedBallSet& set, std::span<const double> f,
                            const ProjectionOptions& options) {
  const int d = set.dim();
  if (static_cast<int>(f.size()) != d) throw InvalidArgument("dimension mismatch in project");
  std::vector<double> x(f.begin(), f.end());
  if (d == 0) return x;

  std::vector<std::vector<double>> q(d, std::vector<double>(d, 0.0));
  if (!options.initialCorrections.empty()) {
    if (static_cast<int>(options.initialCorrections.size()) != d)
      throw InvalidArgument("one initial correction per constraint is required");
    q = options.initialCorrections;
    for (const auto& qm : q)
      for (int i = 0; i < d; ++i) x[i] -= qm[i];
  }

  std::vector<double> y(d), before(d);
  for (int sweep = 0; sweep < options.maxSweeps; ++sweep) {
    before = x;
    for (int m = 0; m < d; ++m) {
      for (int i = 0; i < d; ++i) y[i] = x[i] + q[m][i];
      x = y;
      set.project_onto_constraint(m, x);
      for (int i = 0; i < d; ++i) q[m][i] = y[i] - x[i];
    }
    double moved = 0.0;
    for (int i = 0; i < d; ++i) moved = std::max(moved, std::abs(x[i] - before[i]));
    if (moved < options.tolerance) return x;
  }
  throw ConvergenceError("projection did not converge within " +
                         std::to_string(options.maxSweeps) + " sweeps");
}

LinearMaxResult linear_maximize(const NestedBallSet& set, std::span<const double> c,
                                int maxIterations) {
  const int d = set.dim();
  if (static_cast<int>(c.size()) != d)
    throw InvalidArgument("dimension mismatch in linear_maximize");
  LinearMaxResult result;
  result.maximizer.assign(d, 0.0);
  const double norm = std::sqrt(dot(c, c));
  if (norm == 0.0) return result;

  auto& x = result.maximizer;
  double value = 0.0;
  std::vector<double> step(d);
  for (int it = 1; it <= maxIterations; ++it) {
    for (int i = 0; i < d; ++i) step[i] = x[i] + c[i] / norm;
    x = project(set, step);
    const double next = dot(c, x);
    const double gain = next - value;
    value = next;
    result.iterations = it;
    if (gain < 1e-12) {
      result.value = value;
      return result;
    }
  }
  throw ConvergenceError("linear maximization did not converge within " +
                         std::to_string(maxIterations) + " iterations");
}

NestedBallSet grem_constraint_set(std::span<const double> p) {
  const std::vector<double> ones(p.size(), 1.0);
  return prefix_constraint_set(p, ones, 0, static_cast<int>(p.size()));
}

NestedBallSet prefix_constraint_set(std::span<const double> p,
                                    std::span<const double> weights, int l, int r) {
  if (l < 0 || l > r || r > static_cast<int>(p.size()))
    throw InvalidArgument("prefix set needs 0 <= l <= r <= k");
  const double bs2 = beta_star() * beta_star();
  std::vector<double> radii(r - l);
  double mass = 0.0;
  for (int m = 0; m < r - l; ++m) {
    mass += weights[l + m] * p[l + m];
    radii[m] = bs2 * mass;
  }
  return NestedBallSet(std::move(radii));
}

AlphaProfile::AlphaProfile(int k, int j, double alpha) : j_(j), alpha_(alpha) {
  if (j < 1 || j > k) throw InvalidArgument("alpha profile level must lie in 1..k");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  weights_.resize(k);
  complement_.resize(k);
  for (int n = 0; n < k; ++n) {
    weights_[n] = n < j - 1 ? 1.0 : (n == j - 1 ? alpha : 0.0);
    complement_[n] = 1.0 - weights_[n];
  }
}

double q_value(std::span<const double> p, std::span<const double> weights, int r, int s) {
  double q = 0.0;
  for (int m = r; m < s; ++m) q += weights[m] * p[m];
  return q;
}

GTerm g_term(std::span<const double> p, std::span<const double> mStar,
             std::span<const double> weights, int l, int r) {
  GTerm g;
  g.q = q_value(p, weights, l, r);
  if (l == r) return g;
  const auto set = prefix_constraint_set(p, weights, l, r);
  const std::span<const double> block = mStar.subspan(l, r - l);
  g.w = project(set, block);
  const double bs2 = beta_star() * beta_star();
  double dist2 = 0.0;
  for (int i = 0; i < r - l; ++i) dist2 += (block[i] - g.w[i]) * (block[i] - g.w[i]);
  g.value = 0.5 * bs2 * g.q + 0.5 * (dot(block, block) - dist2);
  g.valueAlt = 0.5 * bs2 * g.q + dot(block, g.w) - 0.5 * dot(g.w, g.w);
  return g;
}

PhiHat phi_hat(std::span<const double> p, std::span<const double> mStar, int r, int s) {
  PhiHat out;
  if (r == s) return out;
  const std::vector<double> ones(p.size(), 1.0);
  const auto set = prefix_constraint_set(p, ones, r, s);
  auto lm = linear_maximize(set, mStar.subspan(r, s - r));
  out.z = std::move(lm.maximizer);
  out.value = lm.value;
  return out;
}

PsiResult psi_j(std::span<const double> p, std::span<const double> mStar,
                const AlphaProfile& alpha) {
  const int k = alpha.levelCount();
  const int j = alpha.j();
  std::vector<std::vector<double>> phi(k + 1, std::vector<double>(k + 1, 0.0));
  std::vector<std::vector<bool>> known(k + 1, std::vector<bool>(k + 1, false));
  auto phiAt = [&](int r, int s) {
    if (!known[r][s]) {
      phi[r][s] = phi_hat(p, mStar, r, s).value;
      known[r][s] = true;
    }
    return phi[r][s];
  };

  std::vector<double> gLeft(j + 1), gRight(k + 1);
  for (int s = 0; s <= j; ++s) gLeft[s] = g_term(p, mStar, alpha.weights(), s, j).value;
  for (int r = j - 1; r <= k; ++r)
    gRight[r] = g_term(p, mStar, alpha.complement(), r, k).value;

  PsiResult best;
  bool first = true;
  for (int s = 0; s <= j; ++s) {
    for (int r = j - 1; r <= k; ++r) {
      const double term = phiAt(0, s) + phiAt(j - 1, r) + gLeft[s] + gRight[r];
      if (first || term > best.value) {
        best = {term, s, r};
        first = false;
      }
    }
  }
  best.value += phiAt(0, j - 1) + phiAt(j, k);
  return best;
}

Step4Quantities step4_quantities(const ModelSpec& spec, const FreeEnergyProfile& profile,
                                 const AlphaProfile& alpha, int l, int r, int s) {
  const int k = spec.k;
  if (l < 0 || l > r || r > k || s < r || s > k)
    throw InvalidArgument("step-4 indices need 0 <= l <= r <= s <= k");
  Step4Quantities out;
  auto g = g_term(spec.p, profile.mStar, alpha.weights(), l, r);
  out.qValue = g.q;
  out.wProj = std::move(g.w);
  out.gValue = g.value;
  out.gValueAlt = g.valueAlt;
  auto ph = phi_hat(spec.p, profile.mStar, r, s);
  out.phiHat = ph.value;
  out.phiMaximizer = std::move(ph.z);
  out.psiJ = psi_j(spec.p, profile.mStar, alpha).value;
  return out;
}

}  // namespace grem
