#pragma once

#include "chacon/rational.hpp"

namespace chacon {

// H([lo,hi]) for the uniform Bernoulli measure on {1,2}^N, pushed to [0,1]
// by alpha -> sum alpha_j d^{-(j+1)}. Lower bound counts generation-`depth`
// pieces whose convex hull lies inside [lo,hi], upper bound those meeting it.
Enclosure cantor_measure_of_interval(const Rational& lo, const Rational& hi, int d, int depth);

// Convex hull of the Cantor piece with prefix value v at generation L:
// [v + d^{-L}/(d-1), v + 2 d^{-L}/(d-1)].
Enclosure cantor_piece_hull(const Rational& prefix_value, int L, int d);

}  // namespace chacon
