// gremlab: command-line front end for the GREM dynamics library.
//
// Exit codes: 0 success, 1 invalid configuration, 2 resource cap or I/O
// failure, 3 verification failure, 4 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "grem/analytic.hpp"
#include "grem/convexgeom.hpp"
#include "grem/dynamics.hpp"
#include "grem/errors.hpp"
#include "grem/experiment.hpp"
#include "grem/paths.hpp"
#include "grem/verify.hpp"

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitResource = 2;
constexpr int kExitVerify = 3;
constexpr int kExitNumerical = 4;

using grem::ExperimentConfig;
using grem::format_real;

struct Flags {
  std::string configPath;
  std::map<std::string, std::vector<std::string>> values;
  bool timings = false;
  bool acceptance = false;
  std::vector<int> criteria;
};

void add_model_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("-c,--config", flags.configPath, "key = value configuration file");
  const std::pair<const char*, const char*> keys[] = {
      {"k", "number of levels"},
      {"p", "level size fractions (comma list)"},
      {"a", "level variance weights (comma list)"},
      {"N", "system sizes"},
      {"beta", "inverse temperatures"},
      {"seed", "disorder seeds"},
      {"kappa", "goodness threshold"},
      {"eps", "near/far threshold"},
      {"j", "profile indices for psi-check"},
      {"alpha", "alpha grid for psi-check"},
      {"point", "vector to project"},
      {"out", "output file (default stdout)"},
  };
  for (const auto& [key, help] : keys)
    cmd->add_option(std::string("--") + key, flags.values[key], help)->delimiter(',');
}

ExperimentConfig build_config(const Flags& flags) {
  ExperimentConfig config =
      flags.configPath.empty() ? ExperimentConfig{} : grem::load_config(flags.configPath);
  for (const auto& [key, parts] : flags.values) {
    if (parts.empty()) continue;
    std::string joined;
    for (std::size_t n = 0; n < parts.size(); ++n) joined += (n ? "," : "") + parts[n];
    grem::set_config_value(config, key, joined);
  }
  config.validate();
  return config;
}

void write_output(const ExperimentConfig& config, const std::string& text) {
  if (config.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(config.out, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + config.out + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::ios_base::failure("write to '" + config.out + "' failed");
}

int cmd_free_energy(const ExperimentConfig& c) {
  const auto decomp = grem::block_decomposition(c.p, c.a);
  std::ostringstream out;
  out << "beta,phase,F,bound\n";
  for (double beta : c.betas) {
    const auto prof = grem::free_energy_profile(decomp, c.p, c.a, beta);
    out << format_real(beta) << ',' << prof.phaseIndex << ',' << format_real(prof.F) << ','
        << format_real(prof.bound) << '\n';
  }
  write_output(c, out.str());
  return 0;
}

int cmd_gap(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "N,beta,seed,lambda,rate,mu1\n";
  for (int N : c.Ns)
    for (double beta : c.betas)
      for (std::uint64_t seed : c.seeds) {
        const auto spec = c.spec(N, beta, seed);
        const auto P = grem::build_transition_matrix(grem::Environment::sample(spec), spec);
        const auto s = grem::spectral_gap(P);
        out << N << ',' << format_real(beta) << ',' << seed << ',' << format_real(s.gap) << ','
            << format_real(s.rate) << ',' << format_real(s.eigenvalues.at(1)) << '\n';
      }
  write_output(c, out.str());
  return 0;
}

int cmd_congestion(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "N,beta,seed,kappa,eps,rho,log_rho_over_N,max_length,good_fraction,"
         "rule1_direct,rule1_fallback,rule2_concat,rule2_fallback\n";
  const int cap = grem::dense_cap();
  for (int N : c.Ns)
    for (double beta : c.betas)
      for (std::uint64_t seed : c.seeds) {
        const auto spec = c.spec(N, beta, seed);
        const auto P = grem::build_transition_matrix(grem::Environment::sample(spec), spec);
        const auto paths = grem::build_gamma_N(P.hamiltonians(), spec, c.kappa, c.eps, cap);
        const auto cong = grem::congestion(P, paths);
        const auto& r = paths.ruleCounts();
        out << N << ',' << format_real(beta) << ',' << seed << ',' << format_real(c.kappa)
            << ',' << format_real(c.eps) << ',' << format_real(cong.rho) << ','
            << format_real(std::log(cong.rho) / N) << ',' << cong.maxLength << ','
            << format_real(paths.goodFraction()) << ',' << r.directFirstGood << ','
            << r.directFallback << ',' << r.concatenated << ',' << r.nearFallback << '\n';
      }
  write_output(c, out.str());
  return 0;
}

int cmd_sweep(const ExperimentConfig& c, bool timed) {
  std::ostringstream out;
  grem::emit_rows(grem::run_sweep(c, timed), out);
  write_output(c, out.str());
  return 0;
}

int cmd_project(const ExperimentConfig& c) {
  const auto decomp = grem::block_decomposition(c.p, c.a);
  const auto set = grem::grem_constraint_set(c.p);
  std::ostringstream out;
  out << "beta,coordinate,input,projection\n";
  for (double beta : c.betas) {
    const auto input =
        c.point.empty() ? grem::equilibrium_vectors(decomp, c.a, beta).mStar : c.point;
    const auto w = grem::project(set, input);
    for (std::size_t i = 0; i < w.size(); ++i)
      out << format_real(beta) << ',' << i + 1 << ',' << format_real(input[i]) << ','
          << format_real(w[i]) << '\n';
  }
  write_output(c, out.str());
  return 0;
}

int cmd_psi_check(const ExperimentConfig& c) {
  const auto decomp = grem::block_decomposition(c.p, c.a);
  std::vector<int> js = c.js;
  if (js.empty())
    for (int j = 1; j <= c.k; ++j) js.push_back(j);
  std::vector<double> alphas = c.alphas;
  if (alphas.empty())
    for (int n = 0; n <= 10; ++n) alphas.push_back(n / 10.0);

  bool ok = true;
  std::ostringstream out;
  out << "beta,j,alpha,psi,bound_plus_F,margin\n";
  for (double beta : c.betas) {
    const auto prof = grem::free_energy_profile(decomp, c.p, c.a, beta);
    for (int j : js)
      for (double alpha : alphas) {
        const double psi = grem::psi_j(c.p, prof.mStar, grem::AlphaProfile(c.k, j, alpha)).value;
        const double rhs = prof.bound + prof.F;
        ok = ok && psi <= rhs + grem::tol::kPsi;
        out << format_real(beta) << ',' << j << ',' << format_real(alpha) << ','
            << format_real(psi) << ',' << format_real(rhs) << ',' << format_real(rhs - psi)
            << '\n';
      }
  }
  write_output(c, out.str());
  if (!ok) std::cerr << "psi bound violated\n";
  return ok ? 0 : kExitVerify;
}

int cmd_verify(const ExperimentConfig& c, const Flags& flags) {
  grem::VerifyReport report;
  if (flags.acceptance || !flags.criteria.empty()) {
    std::vector<int> ids = flags.criteria;
    if (ids.empty())
      for (int id = 1; id <= grem::kAcceptanceCriteria; ++id) ids.push_back(id);
    for (int id : ids) report.checks.push_back(grem::acceptance_criterion(id));
  } else {
    report = grem::verify_instances(c);
  }
  std::ostringstream out;
  grem::print_report(report, out);
  write_output(c, out.str());
  if (!report.allPassed()) {
    for (const auto& check : report.checks)
      if (!check.pass) std::cerr << "verification failed: " << check.name << '\n';
    return kExitVerify;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gremlab: Metropolis dynamics, canonical paths and free energy of the GREM"};
  app.require_subcommand(1);
  Flags flags;

  auto* freeEnergy = app.add_subcommand("free-energy", "analytic F(beta) and bound over the beta grid");
  auto* gap = app.add_subcommand("gap", "exact spectral gap per grid point");
  auto* cong = app.add_subcommand("congestion", "canonical path set and its congestion");
  auto* verify = app.add_subcommand("verify", "invariant suite (or acceptance criteria)");
  auto* sweep = app.add_subcommand("sweep", "full result table over the grid");
  auto* project = app.add_subcommand("project", "projection onto the constraint set");
  auto* psi = app.add_subcommand("psi-check", "psi_j against bound + F");
  for (auto* cmd : {freeEnergy, gap, cong, verify, sweep, project, psi}) add_model_flags(cmd, flags);
  sweep->add_flag("--timings", flags.timings, "fill ms_elapsed (output no longer reproducible)");
  verify->add_flag("--acceptance", flags.acceptance, "run acceptance criteria 1-10");
  verify->add_option("--criterion", flags.criteria, "run selected acceptance criteria")
      ->check(CLI::Range(1, grem::kAcceptanceCriteria));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    const ExperimentConfig config = build_config(flags);
    if (freeEnergy->parsed()) return cmd_free_energy(config);
    if (gap->parsed()) return cmd_gap(config);
    if (cong->parsed()) return cmd_congestion(config);
    if (sweep->parsed()) return cmd_sweep(config, flags.timings);
    if (project->parsed()) return cmd_project(config);
    if (psi->parsed()) return cmd_psi_check(config);
    return cmd_verify(config, flags);
  } catch (const grem::InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const grem::ResourceCapExceeded& e) {
    std::cerr << "resource cap exceeded: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
