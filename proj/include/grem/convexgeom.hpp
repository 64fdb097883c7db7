#pragma once

// Nested quadratic constraint sets
//   K = { x in R^d : sum_{i<m} x_i^2 <= r_m^2 for every m = 1..d }
// with Euclidean projection (Dykstra's alternating scheme), linear
// maximization (projected gradient ascent), and the prefix-set quantities
// Q, G, Phi-hat and psi_j assembled from them.

#include <span>
#include <vector>

#include "grem/analytic.hpp"
#include "grem/model.hpp"

namespace grem {

class NestedBallSet {
 public:
  /// radiiSq[m] bounds the squared norm of the first m+1 coordinates. A
  /// bound that is not binding (larger than a later one) is replaced by the
  /// suffix minimum, which describes the same set.
  explicit NestedBallSet(std::vector<double> radiiSq);

  int dim() const { return static_cast<int>(radiiSq_.size()); }
  const std::vector<double>& radiiSq() const { return radiiSq_; }

  bool contains(std::span<const double> x, double tol = 0.0) const;
  /// Largest violation max_m (prefix norm^2 - r_m^2), or <= 0 when inside.
  double violation(std::span<const double> x) const;
  /// Radial projection onto the single constraint on the first m+1 coordinates.
  void project_onto_constraint(int m, std::span<double> x) const;

 private:
  std::vector<double> radiiSq_;
};

struct ProjectionOptions {
  double tolerance = 1e-12;
  int maxSweeps = 100000;
  /// Starting correction vectors, one per constraint; empty means zeros.
  std::vector<std::vector<double>> initialCorrections;
};

/// Nearest point of `set` to `f`. Throws ConvergenceError at the sweep cap.
std::vector<double> project(const NestedBallSet& set, std::span<const double> f,
                            const ProjectionOptions& options = {});

struct LinearMaxResult {
  std::vector<double> maximizer;
  double value = 0.0;
  int iterations = 0;
};

LinearMaxResult linear_maximize(const NestedBallSet& set, std::span<const double> c,
                                int maxIterations = 100000);

/// Psi_k: radii beta*^2 (p_1 + ... + p_m).
NestedBallSet grem_constraint_set(std::span<const double> p);

/// Set on coordinates l+1..r with radii beta*^2 sum_{n=l+1}^{l+m} weights_n p_n.
/// With unit weights this is the anchored sub-block set of the free-energy
/// constraints; l and r are level counts, 0 <= l <= r <= k.
NestedBallSet prefix_constraint_set(std::span<const double> p,
                                    std::span<const double> weights, int l, int r);

/// alpha^j: weights 1 below level j, alpha at level j, 0 above (j is 1-based).
class AlphaProfile {
 public:
  AlphaProfile(int k, int j, double alpha);

  int levelCount() const { return static_cast<int>(weights_.size()); }
  int j() const { return j_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& weights() const { return weights_; }
  /// 1 - alpha^j componentwise.
  const std::vector<double>& complement() const { return complement_; }

 private:
  int j_;
  double alpha_;
  std::vector<double> weights_;
  std::vector<double> complement_;
};

/// sum_{m=r+1}^s weights_m p_m.
double q_value(std::span<const double> p, std::span<const double> weights, int r, int s);

struct GTerm {
  std::vector<double> w;    // projection of the m* block onto the prefix set
  double q = 0.0;
  double value = 0.0;       // distance form
  double valueAlt = 0.0;    // inner-product form
};

/// G_{l,r} with the weights' prefix set; zero when l == r.
GTerm g_term(std::span<const double> p, std::span<const double> mStar,
             std::span<const double> weights, int l, int r);

struct PhiHat {
  std::vector<double> z;
  double value = 0.0;
};

/// Maximum of <m*_{r+1..s}, y> over the anchored set of coordinates r+1..s.
PhiHat phi_hat(std::span<const double> p, std::span<const double> mStar, int r, int s);

struct PsiResult {
  double value = 0.0;
  int argS = 0;  // maximizing s in 0..j
  int argR = 0;  // maximizing r in j-1..k
};

PsiResult psi_j(std::span<const double> p, std::span<const double> mStar,
                const AlphaProfile& alpha);

struct Step4Quantities {
  double qValue = 0.0;
  std::vector<double> wProj;
  double gValue = 0.0;
  double gValueAlt = 0.0;
  double phiHat = 0.0;
  std::vector<double> phiMaximizer;
  double psiJ = 0.0;
};

/// Q_l^r and G_{l,r} under alpha^j, Phi-hat_r^s, and psi_j for one instance.
Step4Quantities step4_quantities(const ModelSpec& spec, const FreeEnergyProfile& profile,
                                 const AlphaProfile& alpha, int l, int r, int s);

}  // namespace grem
