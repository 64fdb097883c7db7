// Acceptance criteria 1-10, one PASS/FAIL line each.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "grem/verify.hpp"

int main(int argc, char** argv) {
  int first = 1, last = grem::kAcceptanceCriteria;
  if (argc > 1) first = last = std::atoi(argv[1]);
  bool ok = true;
  for (int id = first; id <= last; ++id) {
    const auto start = std::chrono::steady_clock::now();
    grem::CheckResult r;
    try {
      r = grem::acceptance_criterion(id);
    } catch (const std::exception& e) {
      r = {"criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
    }
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str(), sec);
    std::fflush(stdout);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
