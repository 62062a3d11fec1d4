#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace aoimac {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // worst-case margin, formatted for the report table
};

struct ValidationOptions {
  double tolerance = 0.02;  // relative tolerance for the sim-vs-analytic check
  std::uint64_t horizon = 1'000'000;
  std::uint64_t seed = 424242;
  unsigned jobs = 0;  // 0 = hardware concurrency
  std::vector<double> lambda_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::vector<double> delta_grid{0.2, 0.6, 1.0};
};

// Runs the full cross-validation suite (closed forms vs simulation, policy
// dominance, decision-mix and backlog certificates, optimizer brute-force),
// printing one PASS/FAIL line per check to `out` as it completes.
std::vector<CheckResult> run_validation(const ValidationOptions& options, std::ostream& out);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace aoimac
