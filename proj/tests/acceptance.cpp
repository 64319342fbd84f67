// Acceptance runner: one PASS/FAIL line per criterion with its checks
// listed underneath. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "cm/validate.hpp"

int main() {
  cm::validate::Options opt;
  opt.full = true;
  opt.seed = 1;
  if (const char* t = std::getenv("CM_THREADS")) opt.threads = std::max(1, std::atoi(t));
  else opt.threads = std::max(1u, std::thread::hardware_concurrency());

  const char* criteria[][2] = {
      {"1", "tournaments"}, {"2", "regular-graphs"}, {"3", "subgraph-prob"}, {"4", "martingale"},
      {"5", "isserlis"},    {"6", "whitening"},      {"7", "laplace"},       {"8", "concentration"},
  };
  int failed = 0;
  for (const auto& [num, suite] : criteria) {
    const auto r = cm::validate::run_suite(suite, opt);
    std::printf("criterion %s [%s]: %s (%zu checks, %.1f s)\n", num, suite, r.pass() ? "PASS" : "FAIL", r.checks.size(),
                r.seconds);
    for (const auto& c : r.checks) {
      std::printf("    %s  %s", c.pass ? "ok  " : "FAIL", c.name.c_str());
      if (!c.detail.empty()) std::printf(": %s", c.detail.c_str());
      if (c.seconds >= 0) std::printf(" [%.3g s]", c.seconds);
      std::printf("\n");
    }
    std::fflush(stdout);
    failed += !r.pass();
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
