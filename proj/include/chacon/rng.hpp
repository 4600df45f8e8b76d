#pragma once

#include <cstdint>

namespace chacon {

// Counter-mode randomness: every random quantity is a pure function of
// (seed, stream, index), so results never depend on evaluation order or on
// how work is split across threads.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Streams used by the library; kept distinct so that e.g. fiber i of a shear
// run and fiber i of an exceptional-set run with the same seed coincide.
enum : std::uint64_t {
    kStreamDigits = 1,
    kStreamFiber = 2,
    kStreamPoints = 3,
    kStreamFunctions = 4,
};

}  // namespace chacon
