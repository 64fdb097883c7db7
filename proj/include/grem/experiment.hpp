#pragma once

// Batch plumbing for the command-line tool: key=value configuration files,
// per-instance result rows and their CSV form.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "grem/model.hpp"

namespace grem {

/// Flat experiment description. Text form, one `key = value` per line,
/// `#` starts a comment, lists are comma separated:
///
///   k = 2
///   p = 0.5, 0.5
///   a = 0.7, 0.3
///   N = 6, 8
///   beta = 0.5, 2
///   seed = 1, 2, 3
///   kappa = 1
///   eps = 0.25
///   j = 1            # psi-check: profile indices (empty = all)
///   alpha = 0, 0.5   # psi-check: alpha grid (empty = 0, 0.1, ..., 1)
///   point = 1, 0.2   # project: vector to project (empty = m*)
///   out = results.csv
struct ExperimentConfig {
  int k = 1;
  std::vector<double> p{1.0};
  std::vector<double> a{1.0};
  std::vector<int> Ns{8};
  std::vector<double> betas{1.0};
  std::vector<std::uint64_t> seeds{1};
  double kappa = 1.0;
  double eps = 0.25;
  std::vector<int> js;
  std::vector<double> alphas;
  std::vector<double> point;
  std::string out;

  bool operator==(const ExperimentConfig&) const = default;

  /// Model spec for one grid point; does not validate.
  ModelSpec spec(int N, double beta, std::uint64_t seed) const;
  /// Grids nonempty, weights valid, every grid point a valid ModelSpec,
  /// kappa > 0, eps in (0, 1/2). Throws InvalidArgument.
  void validate() const;
};

/// Sets one key from its textual value; unknown keys throw InvalidArgument.
void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value);
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Text that parse_config reads back to an equal config.
std::string format_config(const ExperimentConfig& config);

struct ResultRow {
  int N = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  double finiteVolumeF = 0.0;
  double F = 0.0;
  double bound = 0.0;
  double lambda = 0.0;
  double rate = 0.0;
  double rho = 0.0;
  double logRhoOverN = 0.0;
  double goodFraction = 0.0;
  std::size_t rule1Direct = 0;
  std::size_t rule1Fallback = 0;
  std::size_t rule2Concat = 0;
  std::size_t rule2Fallback = 0;
  double msElapsed = 0.0;
};

inline constexpr const char* kResultHeader =
    "N,beta,seed,F_N,F,bound,lambda,rate,rho,log_rho_over_N,good_fraction,"
    "rule1_direct,rule1_fallback,rule2_concat,rule2_fallback,ms_elapsed";

/// Real number with 12 significant digits.
std::string format_real(double x);

/// Header plus one line per row, LF terminated.
void emit_rows(const std::vector<ResultRow>& rows, std::ostream& out);
/// Writes to `path`; I/O failures throw std::ios_base::failure.
void emit_rows(const std::vector<ResultRow>& rows, const std::string& path);

/// Full computation for one grid point. ms_elapsed stays 0 unless timed.
ResultRow compute_row(const ExperimentConfig& config, int N, double beta, std::uint64_t seed,
                      bool timed = false);

/// Cross product of the grids, sorted by (N, beta, seed).
std::vector<ResultRow> run_sweep(const ExperimentConfig& config, bool timed = false);

}  // namespace grem
