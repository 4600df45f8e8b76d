#pragma once

#include "chacon/parameter_word.hpp"
#include "chacon/rational.hpp"

#include <vector>

namespace chacon {

// Z_n = [1-d^{-n}, 1-d^{-(n+1)}) u [1+alpha^{(n-1)}, 1+alpha^{(n)})
struct Band {
    int n = 0;
    Rational left_lo, left_hi;
    Rational spacer_lo, spacer_hi;
};

// One translation piece of T on band n: [lo,hi) -> [lo,hi) + shift.
struct Piece {
    Rational lo, hi, shift;
};

// T_alpha with cached partial sums alpha^{(n)}. Not thread-safe (the cache
// grows lazily); use one instance per thread.
class ChaconMap {
public:
    explicit ChaconMap(ParameterWord w, int alpha_depth = 64);

    const ParameterWord& word() const { return w_; }
    int d() const { return w_.d(); }
    const Enclosure& alpha() const { return alpha_; }

    const Rational& partial(int n);  // alpha^{(n)}, n >= -1
    Band band(int n);
    const std::vector<Piece>& pieces(int n);  // sorted by lo

    int band_index(const Rational& x);
    Rational apply(const Rational& x);
    std::vector<Rational> orbit(const Rational& x, std::int64_t steps);

private:
    void check_domain(const Rational& x) const;

    ParameterWord w_;
    Enclosure alpha_;
    std::vector<Rational> partial_;  // partial_[n+1] = alpha^{(n)}
    std::vector<Rational> dpow_;     // dpow_[n] = d^{-n}
    std::vector<std::vector<Piece>> pieces_;
    const Rational& dinv(int n);
};

int band_index(const Rational& x, const ParameterWord& w);
Rational apply_T(const Rational& x, const ParameterWord& w);
std::vector<Rational> orbit(const Rational& x, const ParameterWord& w, std::int64_t steps);

// Finite union of disjoint half-open intervals, kept sorted and merged.
class IntervalSet {
public:
    struct Interval {
        Rational lo, hi;
    };

    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> v);  // normalizes
    static IntervalSet single(const Rational& lo, const Rational& hi);

    const std::vector<Interval>& intervals() const { return iv_; }
    size_t size() const { return iv_.size(); }
    bool empty() const { return iv_.empty(); }
    Rational measure() const;
    IntervalSet intersect(const IntervalSet& o) const;
    Rational intersect_measure(const Rational& lo, const Rational& hi) const;

    friend bool operator==(const IntervalSet& a, const IntervalSet& b);

private:
    std::vector<Interval> iv_;
};

// Image of s under T^steps. Each step splits intervals against the bands
// they meet; pieces reaching bands deeper than `band_cap` are not followed
// and their Lebesgue mass is added to `defect` instead (the result is then a
// subset of the true image whose measure is short by exactly `defect`).
struct PushForwardResult {
    IntervalSet set;
    Rational defect;
    size_t max_pieces = 0;
};

PushForwardResult push_forward(const IntervalSet& s, ChaconMap& T, std::int64_t steps, int band_cap = 40,
                               size_t piece_budget = 2000000);
IntervalSet push_forward_step(const IntervalSet& s, ChaconMap& T, int band_cap, Rational& defect);

}  // namespace chacon

namespace chacon {

// Same propagation as push_forward_step, on the exact fixed-point grid
// d^{-scale}: every endpoint that arises (band ends, spacer ends, translation
// amounts up to band `band_cap`) is a d-adic rational with denominator
// dividing d^{scale}, so integers over d^{scale} represent them exactly.
class FixedPointPropagator {
public:
    using Int = __int128;

    FixedPointPropagator(const ParameterWord& w, int band_cap);

    int scale() const { return scale_; }
    Int unit() const { return unit_; }
    Rational to_rational(Int v) const;
    Int from_rational(const Rational& x) const;  // throws unless exactly on the grid

    void reset(const IntervalSet& s);
    void step();
    Rational measure() const;
    Rational defect() const { return to_rational(defect_); }
    Rational intersect_measure(const Rational& lo, const Rational& hi) const;
    Int intersect_units(Int lo, Int hi) const;
    IntervalSet current() const;
    size_t size() const { return iv_.size(); }

private:
    struct FPiece {
        Int lo, hi, shift;
    };
    int d_, cap_, scale_;
    Int unit_;
    std::vector<Int> left_lo_;    // left_lo_[n] = 1 - d^{-n}
    std::vector<Int> spacer_lo_;  // spacer_lo_[n] = 1 + alpha^{(n-1)}
    std::vector<std::vector<FPiece>> pieces_;
    std::vector<std::pair<Int, Int>> iv_, scratch_;
    Int defect_ = 0;
};

}  // namespace chacon
