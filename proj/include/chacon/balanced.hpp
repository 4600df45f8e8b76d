#pragma once

#include "chacon/rational.hpp"

#include <cstdint>
#include <vector>

namespace chacon {

// Balanced radix-d expansion: l = sum_j a_j d^j with |a_j| <= (d-1)/2.
struct BalancedIndex {
    std::int64_t value = 0;
    int d = 7;
    std::vector<int> digits;  // a_0 first; no trailing zeros
    int nonzero_count = 0;

    int digit(int j) const { return j < static_cast<int>(digits.size()) ? digits[static_cast<size_t>(j)] : 0; }
    int top() const { return static_cast<int>(digits.size()) - 1; }  // -1 for l = 0
};

// Accepts negative values too (needed for differences of indices).
BalancedIndex balanced_expand(std::int64_t ell, int d);
std::int64_t reconstruct(const BalancedIndex& b);

// q_{l,j}/d^j = sum_{i>j} a_i d^{i-j} + a_j [a_j < 0]; non-negative for l >= 0.
std::int64_t odometer_offset(const BalancedIndex& b, int j);

// Exact floor(log_d n) for n >= 1.
int floor_log(std::int64_t n, int d);
std::int64_t ipow64(int d, int e);  // throws BudgetExceeded on overflow

inline int sgn(int v) { return (v > 0) - (v < 0); }

}  // namespace chacon
