#pragma once

// Metropolis single-spin-flip chain on the hypercube: dense one-step
// matrix, spectral gap by a symmetric eigensolve, and the continuous-time
// kernel by uniformization.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "grem/model.hpp"

namespace grem {

inline constexpr int kDefaultDenseCap = 12;
inline constexpr int kHardDenseCap = 14;

class TransitionMatrix {
 public:
  TransitionMatrix(int N, double beta, std::vector<double> hamiltonians);

  int N() const { return N_; }
  double beta() const { return beta_; }
  std::size_t size() const { return hamiltonians_.size(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(std::uint32_t from, std::uint32_t to) const { return entries_(from, to); }
  /// Sum of the off-diagonal entries of a row, computed without cancellation.
  double escape_rate(std::uint32_t from) const { return escape_[from]; }
  const std::vector<double>& stationary() const { return stationary_; }
  const std::vector<double>& hamiltonians() const { return hamiltonians_; }

 private:
  int N_;
  double beta_;
  std::vector<double> hamiltonians_;
  std::vector<double> stationary_;
  std::vector<double> escape_;
  Eigen::MatrixXd entries_;
};

/// Effective dense cap: `fallback`, overridden by GREMLAB_MAX_N when set,
/// never above kHardDenseCap.
int dense_cap(int fallback = kDefaultDenseCap);

TransitionMatrix build_transition_matrix(const Environment& env, const ModelSpec& spec,
                                         int maxN = dense_cap());

struct MatrixDiagnostics {
  double maxRowSumError = 0.0;
  double minEntry = 0.0;
  double maxDetailedBalanceRelError = 0.0;
  bool supportMatchesHypercube = true;
};

MatrixDiagnostics diagnose(const TransitionMatrix& P);

/// Symmetric matrix D^{1/2} (I - P) D^{-1/2} with D = diag(pi).
Eigen::MatrixXd symmetrized_generator(const TransitionMatrix& P);

struct SpectralData {
  /// mu_0 >= mu_1 >= ... (eigenvalues of P).
  std::vector<double> eigenvalues;
  /// 1 - mu_1, refined as the Dirichlet-form Rayleigh quotient of the
  /// computed eigenvector.
  double gap = 0.0;
  double rate = 0.0;  // -(1/N) log gap
};

/// Throws InconsistencyError if mu_0 drifts from 1 by more than 1e-7.
SpectralData spectral_gap(const TransitionMatrix& P);

/// P_t(sigma, .) = e^{-t} sum_n t^n/n! P^n(sigma, .), truncated once the
/// Poisson tail bound falls below `relTail` times the accumulated deviation.
std::vector<double> heat_kernel_row(const TransitionMatrix& P, std::uint32_t sigma,
                                    double t, double relTail = 1e-14);

double total_variation(const std::vector<double>& mu, const std::vector<double>& nu);

struct TvBound {
  double lhs = 0.0;  // 4 |P_t(sigma,.) - pi|_TV^2
  double rhs = 0.0;  // (1 - pi(sigma)) / pi(sigma) * exp(-2 gap t)
  /// exp(-2 gap t) underflows; the inequality is reported as satisfied
  /// without evaluating the kernel.
  bool trivial = false;
  bool holds() const { return trivial || lhs <= rhs; }
};

TvBound tv_bound_check(const TransitionMatrix& P, std::uint32_t sigma, double t, double gap);
TvBound tv_bound_check(const TransitionMatrix& P, std::uint32_t sigma, double t);

}  // namespace grem
