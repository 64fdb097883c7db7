#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <sstream>
#include <tuple>

#include "grem/errors.hpp"
#include "grem/experiment.hpp"
#include "grem/verify.hpp"

using namespace grem;

TEST_SUITE("experiment") {

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.k = 3;
  c.p = {0.4, 0.3, 0.3};
  c.a = {0.1, 0.2, 0.7};
  c.Ns = {4, 6};
  c.betas = {0.1, 1.0 / 3.0, 2.5};
  c.seeds = {1, 18446744073709551615ULL};
  c.kappa = 0.75;
  c.eps = 0.2;
  c.js = {1, 3};
  c.alphas = {0.0, 0.25};
  c.point = {1.5, -0.5, 2.0};
  c.out = "results.csv";
  CHECK(parse_config_text(format_config(c)) == c);
  CHECK(parse_config_text(format_config(ExperimentConfig{})) == ExperimentConfig{});
}

TEST_CASE("config syntax") {
  const auto c = parse_config_text(
      "# comment\n"
      "k = 2\n"
      "p = 0.5,0.5   # trailing\n"
      "a = 0.7, 0.3\n"
      "\n"
      "N = 6\n"
      "beta = 0.5, 2\n");
  CHECK(c.k == 2);
  CHECK(c.a == std::vector<double>{0.7, 0.3});
  CHECK(c.betas == std::vector<double>{0.5, 2.0});
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(parse_config_text("colour = red\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config_text("k = two\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config_text("beta = 1,,2\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config_text("just text\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config_text("N =\n").validate(), InvalidArgument);
  CHECK_THROWS_AS(parse_config_text("k = 2\np = 0.5, 0.5\na = 0.5, 0.5\nN = 1\n").validate(),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_config_text("eps = 0.5\n").validate(), InvalidArgument);
}

TEST_CASE("emission") {
  std::ostringstream empty;
  emit_rows({}, empty);
  CHECK(empty.str() == std::string(kResultHeader) + "\n");

  ResultRow r;
  r.N = 4;
  r.beta = 0.1;
  r.seed = 9;
  r.F = 1.0 / 3.0;
  std::ostringstream one, again;
  emit_rows({r}, one);
  emit_rows({r}, again);
  CHECK(one.str() == again.str());
  const auto text = one.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\r") == std::string::npos);
  CHECK(text.find("0.333333333333,") != std::string::npos);
  CHECK(format_real(2.0) == "2");
}

TEST_CASE("sweep rows are sorted, reproducible and satisfy the logarithmic certificate") {
  auto c = parse_config_text("k = 2\np = 0.5, 0.5\na = 0.7, 0.3\nN = 6, 4\nbeta = 2, 0.5\nseed = 3, 1\n");
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 8);
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const auto& x = rows[n - 1];
    const auto& y = rows[n];
    CHECK(std::tie(x.N, x.beta, x.seed) < std::tie(y.N, y.beta, y.seed));
  }
  for (const auto& row : rows) {
    CHECK(row.rate <= row.logRhoOverN + 1e-9);
    CHECK(row.msElapsed == 0.0);
    CHECK(row.rule1Direct + row.rule1Fallback + row.rule2Concat + row.rule2Fallback ==
          static_cast<std::size_t>((1 << row.N) * ((1 << row.N) - 1)));
  }
  std::ostringstream a, b;
  emit_rows(rows, a);
  emit_rows(run_sweep(c), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("invariant suite passes on a small grid") {
  auto c = parse_config_text(
      "k = 2\np = 0.5, 0.5\na = 0.7, 0.3\nN = 6\nbeta = 0.5, 2\nseed = 1, 2, 3, 4, 5\n");
  const auto report = verify_instances(c);
  CHECK(report.checks.size() >= 10);
  for (const auto& check : report.checks) {
    INFO(check.name << ": " << check.detail);
    CHECK(check.pass);
  }
}

}  // TEST_SUITE
