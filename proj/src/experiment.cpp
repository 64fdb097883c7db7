#include "grem/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <tuple>

#include "grem/analytic.hpp"
#include "grem/dynamics.hpp"
#include "grem/errors.hpp"
#include "grem/parallel.hpp"
#include "grem/paths.hpp"

namespace grem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw InvalidArgument("bad value for '" + key + "': '" + t + "'");
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

std::string exact_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& xs, Fmt fmt) {
  std::string out;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    if (n) out += ", ";
    out += fmt(xs[n]);
  }
  return out;
}

}  // namespace

ModelSpec ExperimentConfig::spec(int N, double beta, std::uint64_t seed) const {
  ModelSpec s;
  s.k = k;
  s.p = p;
  s.a = a;
  s.N = N;
  s.beta = beta;
  s.seed = seed;
  return s;
}

void ExperimentConfig::validate() const {
  if (Ns.empty() || betas.empty() || seeds.empty())
    throw InvalidArgument("N, beta and seed grids must be nonempty");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be positive");
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");
  for (int N : Ns)
    for (double beta : betas) spec(N, beta, seeds.front()).validate();
  for (int j : js)
    if (j < 1 || j > k) throw InvalidArgument("j must lie in 1..k");
  for (double alpha : alphas)
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!point.empty() && static_cast<int>(point.size()) != k)
    throw InvalidArgument("point must have k coordinates");
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "k") c.k = parse_number<int>(key, value);
  else if (key == "p") c.p = parse_list<double>(key, value);
  else if (key == "a") c.a = parse_list<double>(key, value);
  else if (key == "N") c.Ns = parse_list<int>(key, value);
  else if (key == "beta") c.betas = parse_list<double>(key, value);
  else if (key == "seed") c.seeds = parse_list<std::uint64_t>(key, value);
  else if (key == "kappa") c.kappa = parse_number<double>(key, value);
  else if (key == "eps") c.eps = parse_number<double>(key, value);
  else if (key == "j") c.js = parse_list<int>(key, value);
  else if (key == "alpha") c.alphas = parse_list<double>(key, value);
  else if (key == "point") c.point = parse_list<double>(key, value);
  else if (key == "out") c.out = trim(value);
  else throw InvalidArgument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("line " + std::to_string(lineNo) + ": expected key = value");
    set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  return parse_config(in);
}

std::string format_config(const ExperimentConfig& c) {
  const auto real = [](double x) { return exact_real(x); };
  const auto integer = [](auto x) { return std::to_string(x); };
  std::string out;
  out += "k = " + std::to_string(c.k) + "\n";
  out += "p = " + join(c.p, real) + "\n";
  out += "a = " + join(c.a, real) + "\n";
  out += "N = " + join(c.Ns, integer) + "\n";
  out += "beta = " + join(c.betas, real) + "\n";
  out += "seed = " + join(c.seeds, integer) + "\n";
  out += "kappa = " + exact_real(c.kappa) + "\n";
  out += "eps = " + exact_real(c.eps) + "\n";
  out += "j = " + join(c.js, integer) + "\n";
  out += "alpha = " + join(c.alphas, real) + "\n";
  out += "point = " + join(c.point, real) + "\n";
  out += "out = " + c.out + "\n";
  return out;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void emit_rows(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << r.N << ',' << format_real(r.beta) << ',' << r.seed << ','
        << format_real(r.finiteVolumeF) << ',' << format_real(r.F) << ','
        << format_real(r.bound) << ',' << format_real(r.lambda) << ','
        << format_real(r.rate) << ',' << format_real(r.rho) << ','
        << format_real(r.logRhoOverN) << ',' << format_real(r.goodFraction) << ','
        << r.rule1Direct << ',' << r.rule1Fallback << ',' << r.rule2Concat << ','
        << r.rule2Fallback << ',' << format_real(r.msElapsed) << '\n';
  }
}

void emit_rows(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  emit_rows(rows, out);
  out.flush();
  if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

ResultRow compute_row(const ExperimentConfig& config, int N, double beta, std::uint64_t seed,
                      bool timed) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec spec = config.spec(N, beta, seed);
  spec.validate();
  const int cap = dense_cap();
  if (N > cap)
    throw ResourceCapExceeded("N=" + std::to_string(N) + " exceeds dense cap " +
                              std::to_string(cap));

  const Environment env = Environment::sample(spec);
  const GibbsSummary gibbs = gibbs_summary(env, spec, cap);
  const FreeEnergyProfile profile =
      free_energy_profile(block_decomposition(spec.p, spec.a), spec);
  const TransitionMatrix P(N, beta, gibbs.hamiltonians);
  const SpectralData spectral = spectral_gap(P);
  const PathSet paths = build_gamma_N(gibbs.hamiltonians, spec, config.kappa, config.eps, cap);
  const CongestionResult cong = congestion(P, paths);

  ResultRow row;
  row.N = N;
  row.beta = beta;
  row.seed = seed;
  row.finiteVolumeF = gibbs.finiteVolumeFreeEnergy;
  row.F = profile.F;
  row.bound = profile.bound;
  row.lambda = spectral.gap;
  row.rate = spectral.rate;
  row.rho = cong.rho;
  row.logRhoOverN = std::log(cong.rho) / N;
  row.goodFraction = paths.goodFraction();
  row.rule1Direct = paths.ruleCounts().directFirstGood;
  row.rule1Fallback = paths.ruleCounts().directFallback;
  row.rule2Concat = paths.ruleCounts().concatenated;
  row.rule2Fallback = paths.ruleCounts().nearFallback;
  if (timed)
    row.msElapsed = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return row;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& config, bool timed) {
  config.validate();
  struct Point {
    int N;
    double beta;
    std::uint64_t seed;
  };
  std::vector<Point> grid;
  for (int N : config.Ns)
    for (double beta : config.betas)
      for (std::uint64_t seed : config.seeds) grid.push_back({N, beta, seed});
  std::sort(grid.begin(), grid.end(), [](const Point& x, const Point& y) {
    return std::tie(x.N, x.beta, x.seed) < std::tie(y.N, y.beta, y.seed);
  });
  // Grid points are independent; each writes only its own slot.
  std::vector<ResultRow> rows(grid.size());
  parallel_chunks(grid.size(), [&](std::size_t n) {
    rows[n] = compute_row(config, grid[n].N, grid[n].beta, grid[n].seed, timed);
  });
  return rows;
}

}  // namespace grem
