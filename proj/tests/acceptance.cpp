// Runs the ten acceptance criteria at their stated sizes and prints one
// line per criterion. Exit status is nonzero if any criterion fails.
#include <chrono>
#include <cstdio>
#include <string>

#include "freeab/checks.hpp"

using namespace freeab;

namespace {

// criterion 9 goes through the command-line tool itself
auto cli_counterexample() -> checks::Result {
  checks::Result r;
  r.name = "counterexample";
  r.statement = "filters demo-counterexample --primes 3,5 --probe 7 exits 0 with every membership true";
  r.budget = 1.0;
  const std::string cmd = std::string(FREEAB_CLI) + " filters demo-counterexample --primes 3,5 --probe 7 2>&1";
  auto t0 = std::chrono::steady_clock::now();
  FILE *p = popen(cmd.c_str(), "r");
  std::string out;
  if (p) {
    char buf[512];
    while (std::fgets(buf, sizeof buf, p)) out += buf;
  }
  int status = p ? pclose(p) : -1;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int lines = 0;
  for (std::size_t at = 0; (at = out.find(": true (explicit summand check: ok)", at)) != std::string::npos; ++at)
    ++lines;
  bool negative = out.find("false") != std::string::npos || out.find("FAILED") != std::string::npos;
  // phi_3, phi_5 against Lambda(2) and Lambda(7)
  r.ok = status == 0 && lines == 4 && !negative;
  r.detail = "exit " + std::to_string(status) + ", " + std::to_string(lines) + "/4 memberships";
  return r;
}

} // namespace

int main() {
  const std::uint64_t seed = 20261016;
  checks::Result results[] = {
      checks::shear(8, 10),
      checks::zaushko(seed + 1, 200),
      checks::wans(seed + 2, 200),
      checks::three_conjugates(seed + 3, 100),
      checks::dichotomy(seed + 4, 500),
      checks::gcd_identity(seed + 5, 500),
      checks::bezout(12, 6),
      checks::ladder(seed + 4, 500),
      cli_counterexample(),
      checks::serialization(seed + 6, 1000),
  };
  int failed = 0, i = 0;
  for (const auto &r : results) {
    ++i;
    std::printf("[%s] criterion %d %-16s %7.3fs (limit %.0fs)  %s\n", r.passed() ? "PASS" : "FAIL", i,
                r.name.c_str(), r.seconds, r.budget, r.detail.c_str());
    if (!r.passed()) ++failed;
  }
  std::printf("%d/10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
