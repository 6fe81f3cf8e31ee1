#pragma once

// Quick invariant checks across all modules, run by `ircr selftest`.

#include <string>
#include <vector>

namespace ircr {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<SelftestCheck> run_selftest();

}  // namespace ircr
