#pragma once

#include "chacon/rational.hpp"
#include "chacon/rng.hpp"

#include <cstdint>

namespace testing_support {

// Random rational in [lo, hi); denominators are mostly not powers of d so
// digit expansions are genuinely eventually periodic.
inline chacon::Rational sample_point(std::uint64_t i, const chacon::Rational& lo, const chacon::Rational& hi,
                                     std::uint64_t seed = 7) {
    std::uint64_t h = chacon::counter_hash(seed, chacon::kStreamPoints, i);
    long den = 1000 + static_cast<long>(h % 100000);
    long num = static_cast<long>((h >> 20) % static_cast<std::uint64_t>(den));
    return lo + (hi - lo) * chacon::Rational(num, den);
}

inline std::uint64_t sample_int(std::uint64_t i, std::uint64_t bound, std::uint64_t seed = 11) {
    return chacon::counter_hash(seed, chacon::kStreamPoints, i) % bound;
}

}  // namespace testing_support
