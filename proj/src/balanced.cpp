#include "chacon/balanced.hpp"

#include "chacon/errors.hpp"

#include <limits>

namespace chacon {

BalancedIndex balanced_expand(std::int64_t ell, int d) {
    if (d < 3 || d % 2 == 0) throw ConfigError("balanced expansion needs odd d >= 3");
    BalancedIndex b;
    b.value = ell;
    b.d = d;
    const std::int64_t nu = (d - 1) / 2;
    std::int64_t v = ell;
    while (v != 0) {
        std::int64_t r = ((v % d) + d) % d;
        if (r > nu) r -= d;
        b.digits.push_back(static_cast<int>(r));
        if (r != 0) ++b.nonzero_count;
        v = (v - r) / d;
    }
    return b;
}

std::int64_t reconstruct(const BalancedIndex& b) {
    std::int64_t v = 0;
    for (auto it = b.digits.rbegin(); it != b.digits.rend(); ++it) v = v * b.d + *it;
    return v;
}

std::int64_t odometer_offset(const BalancedIndex& b, int j) {
    std::int64_t v = 0;
    for (int i = b.top(); i > j; --i) v = v * b.d + b.digit(i);
    v *= b.d;
    int aj = b.digit(j);
    if (aj < 0) v += aj;
    // v here is sum_{i>j} a_i d^{i-j} + a_j[a_j<0]
    return v;
}

int floor_log(std::int64_t n, int d) {
    if (n < 1) throw DomainError("floor_log of non-positive value");
    int m = 0;
    while (n >= d) {
        n /= d;
        ++m;
    }
    return m;
}

std::int64_t ipow64(int d, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > std::numeric_limits<std::int64_t>::max() / d) throw BudgetExceeded("integer power overflows 64 bits");
        r *= d;
    }
    return r;
}

}  // namespace chacon
