#pragma once

// Invariant and oracle suites shared by `cm validate` and the acceptance
// runner. Each suite is deterministic given Options::seed.

#include <cstdint>
#include <string>
#include <vector>

namespace cm::validate {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = -1;  // timed checks only; kept apart from detail so output is reproducible
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
};

struct Options {
  std::uint64_t seed = 1;
  int threads = 1;
  // Full uses the sample sizes of the acceptance criteria; quick scales
  // them down for interactive runs.
  bool full = false;
};

struct SuiteInfo {
  std::string name;
  std::string summary;
  SuiteResult (*run)(const Options&);
};

const std::vector<SuiteInfo>& suites();

// Throws PreconditionError on an unknown name.
SuiteResult run_suite(const std::string& name, const Options& opt);

}  // namespace cm::validate
