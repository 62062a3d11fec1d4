// Acceptance suite: every published cross-validation criterion at full
// horizon, one PASS/FAIL line each. Exits non-zero if any check fails.
#include <iostream>

#include "aoimac/validation.hpp"

int main() {
  aoimac::ValidationOptions options;  // defaults pin the documented tolerances
  const auto results = aoimac::run_validation(options, std::cout);

  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  std::cout << passed << "/" << results.size() << " acceptance checks passed\n";
  return aoimac::all_passed(results) ? 0 : 1;
}
