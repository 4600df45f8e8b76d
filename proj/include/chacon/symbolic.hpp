#pragma once

#include "chacon/balanced.hpp"
#include "chacon/chacon_map.hpp"
#include "chacon/parameter_word.hpp"
#include "chacon/rational.hpp"

#include <cstdint>
#include <vector>

namespace chacon {

// Point of [0,1) seen as its digit sequence x_1 x_2 ... in base d (x_1 is
// the digit read first, the least significant one for the odometer).
// Stored by its exact value; a rational has an eventually periodic,
// canonical expansion, never ending in all (d-1).
class ShiftPoint {
public:
    ShiftPoint(const Rational& value, int d);
    static ShiftPoint from_digits(const std::vector<int>& prefix, int d);  // zeros afterwards

    const Rational& value() const { return v_; }
    int d() const { return d_; }

    int digit(int j) const;                   // x_{j+1}
    std::vector<int> digits(int count) const;
    ShiftPoint shift(int times = 1) const;    // sigma^times
    ShiftPoint prepend(int w) const;          // wx
    ShiftPoint odometer() const;              // S
    ShiftPoint odometer_pow(std::int64_t q) const;  // S^q by base-d addition with carry

    friend bool operator==(const ShiftPoint& a, const ShiftPoint& b) { return a.d_ == b.d_ && a.v_ == b.v_; }

private:
    Rational v_;
    int d_;
};

// epsilon_k^alpha(x): 0 if x_1 <= d-3, alpha_k if x_1 = d-2, else recurse on
// (sigma alpha, sigma x). Reads alpha_{k+j} where j counts leading (d-1)s.
int epsilon(const ShiftPoint& x, const ParameterWord& w, int k);
std::int64_t symbolic_first_return(const ShiftPoint& x, const ParameterWord& w, int k, std::int64_t h);

struct ReturnCocycle {
    BalancedIndex ell;
    int k = 0;
    std::int64_t h = 1;
    ParameterWord w;

    ReturnCocycle(std::int64_t l, int k_, std::int64_t h_, ParameterWord w_)
        : ell(balanced_expand(l, w_.d())), k(k_), h(h_), w(std::move(w_)) {}
};

// sum_{j} [a_j sum_{i<j} alpha_{k+i} d^{j-1-i}] : the deterministic part
// of t'_l beyond l*h.
std::int64_t return_time_drift(const ReturnCocycle& rc);
// X_j(x) = sgn(a_j) sum_{i<|a_j|} eps_k^{sigma^j alpha}(S^{q_j/d^j + i}(sigma^j x)).
// A digit a_j stands for |a_j| consecutive first returns, so |a_j| reads of
// eps are needed; values lie in {-4,...,4}.
int return_summand(const ReturnCocycle& rc, int j, const ShiftPoint& x);
std::int64_t return_time_closed_form(const ReturnCocycle& rc, const ShiftPoint& x);
// sum_{i<l} (h + eps(S^i x)) by iterating the odometer.
std::int64_t return_time_direct(const ReturnCocycle& rc, const ShiftPoint& x);

// Geometric side: u_k(x) = d^k x maps A_k onto [0,1).
Rational u_k(const Rational& x, int k, int d);
Rational u_k_inv(const Rational& y, int k, int d);
std::int64_t first_return_time(ChaconMap& T, const Rational& x, int k);
Rational induced_map_on_base(ChaconMap& T, const Rational& x, int k);
// t_1, ..., t_count: successive return times of x to A_k under T.
std::vector<std::int64_t> return_times(ChaconMap& T, const Rational& x, int k, int count);

}  // namespace chacon
