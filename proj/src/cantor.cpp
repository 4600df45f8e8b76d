#include "chacon/cantor.hpp"

#include "chacon/errors.hpp"

namespace chacon {

Enclosure cantor_piece_hull(const Rational& v, int L, int d) {
    Rational t = inv_pow(d, L) / Rational(d - 1);
    return {v + t, v + 2 * t};
}

namespace {

void descend(const Rational& lo, const Rational& hi, int d, int depth, int L, const Rational& v,
             const Rational& mass, Rational& lower, Rational& upper) {
    Enclosure hull = cantor_piece_hull(v, L, d);
    if (hull.hi < lo || hull.lo > hi) return;
    if (lo <= hull.lo && hull.hi <= hi) {
        lower += mass;
        upper += mass;
        return;
    }
    if (L == depth) {
        upper += mass;
        return;
    }
    Rational step = inv_pow(d, L + 1), half = mass / Rational(2);
    for (int a = 1; a <= 2; ++a) descend(lo, hi, d, depth, L + 1, v + Rational(a) * step, half, lower, upper);
}

}  // namespace

Enclosure cantor_measure_of_interval(const Rational& lo, const Rational& hi, int d, int depth) {
    if (hi < lo) throw DomainError("cantor measure: lo > hi");
    if (depth < 1) throw DomainError("cantor measure: depth must be >= 1");
    Rational lower(0), upper(0);
    descend(lo, hi, d, depth, 0, Rational(0), Rational(1), lower, upper);
    return {lower, upper};
}

}  // namespace chacon
