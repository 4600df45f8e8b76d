#include "chacon/symbolic.hpp"

#include "chacon/errors.hpp"

#include <cstdlib>

namespace chacon {

ShiftPoint::ShiftPoint(const Rational& value, int d) : v_(value), d_(d) {
    if (value.sign() < 0 || value >= Rational(1)) throw DomainError("shift point must lie in [0,1): " + value.str());
}

ShiftPoint ShiftPoint::from_digits(const std::vector<int>& prefix, int d) {
    Rational v(0), scale(1, d);
    for (int x : prefix) {
        if (x < 0 || x >= d) throw DomainError("digit outside [0,d-1]");
        v += Rational(x) * scale;
        scale /= Rational(d);
    }
    return ShiftPoint(v, d);
}

int ShiftPoint::digit(int j) const {
    Rational y = v_ * Rational(ipow(d_, j + 1));
    BigInt f = y.floor();
    BigInt r = f % d_;
    return static_cast<int>(r.get_si());
}

std::vector<int> ShiftPoint::digits(int count) const {
    std::vector<int> out;
    Rational y = v_;
    for (int j = 0; j < count; ++j) {
        y *= Rational(d_);
        BigInt f = y.floor();
        out.push_back(static_cast<int>(f.get_si()));
        y -= Rational(f);
    }
    return out;
}

ShiftPoint ShiftPoint::shift(int times) const {
    Rational y = v_ * Rational(ipow(d_, times));
    return ShiftPoint(y - Rational(y.floor()), d_);
}

ShiftPoint ShiftPoint::prepend(int w) const {
    if (w < 0 || w >= d_) throw DomainError("digit outside [0,d-1]");
    return ShiftPoint((Rational(w) + v_) / Rational(d_), d_);
}

ShiftPoint ShiftPoint::odometer() const {
    int j = 0;
    Rational y = v_;
    while (true) {
        y *= Rational(d_);
        BigInt f = y.floor();
        if (f != d_ - 1) break;
        y -= Rational(f);
        ++j;
    }
    // x - (1 - d^{-j}) + d^{-(j+1)}
    return ShiftPoint(v_ - (1 - inv_pow(d_, j)) + inv_pow(d_, j + 1), d_);
}

ShiftPoint ShiftPoint::odometer_pow(std::int64_t q) const {
    if (q < 0) throw DomainError("negative odometer power");
    if (q == 0) return *this;
    int K = 0;
    for (std::int64_t t = q; t > 0; t /= d_) ++K;
    // digits x_1..x_K as a little-endian integer
    std::vector<int> xs = digits(K);
    BigInt W = 0;
    for (int t = K - 1; t >= 0; --t) W = W * d_ + xs[static_cast<size_t>(t)];
    BigInt R = W + BigInt(static_cast<long>(q));
    BigInt DK = ipow(d_, K);
    bool carry = R >= DK;
    if (carry) R -= DK;
    Rational prefix(0), scale(1, d_);
    for (int t = 0; t < K; ++t) {
        BigInt r = R % d_;
        R /= d_;
        prefix += Rational(r) * scale;
        scale /= Rational(d_);
    }
    ShiftPoint tail = shift(K);
    if (carry) tail = tail.odometer();
    return ShiftPoint(prefix + tail.value() * inv_pow(d_, K), d_);
}

int epsilon(const ShiftPoint& x, const ParameterWord& w, int k) {
    const int d = x.d();
    Rational y = x.value();
    for (int j = 0;; ++j) {
        y *= Rational(d);
        BigInt f = y.floor();
        if (f <= d - 3) return 0;
        if (f == d - 2) return w.digit(k + j);
        y -= Rational(f);
    }
}

std::int64_t symbolic_first_return(const ShiftPoint& x, const ParameterWord& w, int k, std::int64_t h) {
    return h + epsilon(x, w, k);
}

std::int64_t return_time_drift(const ReturnCocycle& rc) {
    const int d = rc.w.d();
    std::int64_t total = 0, inner = 0;  // inner = sum_{i<j} alpha_{k+i} d^{j-1-i}
    for (int j = 0; j <= rc.ell.top(); ++j) {
        total += rc.ell.digit(j) * inner;
        inner = inner * d + rc.w.digit(rc.k + j);
    }
    return total;
}

int return_summand(const ReturnCocycle& rc, int j, const ShiftPoint& x) {
    int a = rc.ell.digit(j);
    if (a == 0) return 0;
    ShiftPoint y = x.shift(j).odometer_pow(odometer_offset(rc.ell, j));
    ParameterWord wj = rc.w.shift(j);
    int s = 0;
    for (int i = 0; i < std::abs(a); ++i, y = y.odometer()) s += epsilon(y, wj, rc.k);
    return sgn(a) * s;
}

std::int64_t return_time_closed_form(const ReturnCocycle& rc, const ShiftPoint& x) {
    std::int64_t t = rc.ell.value * rc.h + return_time_drift(rc);
    for (int j = 0; j <= rc.ell.top(); ++j) t += return_summand(rc, j, x);
    return t;
}

std::int64_t return_time_direct(const ReturnCocycle& rc, const ShiftPoint& x) {
    std::int64_t t = 0;
    ShiftPoint y = x;
    for (std::int64_t i = 0; i < rc.ell.value; ++i) {
        t += symbolic_first_return(y, rc.w, rc.k, rc.h);
        y = y.odometer();
    }
    return t;
}

Rational u_k(const Rational& x, int k, int d) { return x * Rational(ipow(d, k)); }
Rational u_k_inv(const Rational& y, int k, int d) { return y * inv_pow(d, k); }

namespace {
void check_base(const Rational& x, int k, int d) {
    if (x.sign() < 0 || x >= inv_pow(d, k)) throw DomainError("point " + x.str() + " is not in A_k");
}
}  // namespace

std::int64_t first_return_time(ChaconMap& T, const Rational& x, int k) {
    check_base(x, k, T.d());
    Rational bound = inv_pow(T.d(), k), y = x;
    for (std::int64_t r = 1;; ++r) {
        y = T.apply(y);
        if (y < bound) return r;
    }
}

Rational induced_map_on_base(ChaconMap& T, const Rational& x, int k) {
    check_base(x, k, T.d());
    Rational bound = inv_pow(T.d(), k), y = T.apply(x);
    while (!(y < bound)) y = T.apply(y);
    return y;
}

std::vector<std::int64_t> return_times(ChaconMap& T, const Rational& x, int k, int count) {
    check_base(x, k, T.d());
    Rational bound = inv_pow(T.d(), k), y = x;
    std::vector<std::int64_t> out;
    for (std::int64_t r = 1; static_cast<int>(out.size()) < count; ++r) {
        y = T.apply(y);
        if (y < bound) out.push_back(r);
    }
    return out;
}

}  // namespace chacon
