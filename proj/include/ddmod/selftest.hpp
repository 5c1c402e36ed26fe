#pragma once

#include <string>
#include <vector>

namespace ddmod {

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick internal consistency checks on a small grid.
std::vector<SelftestCheck> run_selftest();

}  // namespace ddmod
