#pragma once

#include <stdexcept>
#include <string>

namespace chacon {

// Error categories map onto CLI exit codes (see tools/chacon_lab.cpp).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace chacon
