#pragma once

#include <string>
#include <vector>

namespace chacon {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Small-scale versions of the library invariants; each runs in about a second.
std::vector<CheckResult> run_selftest();

}  // namespace chacon
