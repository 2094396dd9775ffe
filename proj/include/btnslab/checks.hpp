#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace btns {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick self-test of the library invariants on small seeded instances.
std::vector<CheckResult> run_invariant_checks(std::uint64_t seed);

}  // namespace btns
