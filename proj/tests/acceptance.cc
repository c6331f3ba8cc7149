// runs every acceptance criterion and prints one PASS/FAIL line per check

#include <iostream>

#include "hears/harness/verify.h"

int main() {
  int failed = 0;
  for (const auto& spec : hears::AllChecks()) {
    const hears::CheckResult r = hears::RunCheck(spec);
    std::cout << hears::FormatCheck(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
