#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace chacon {

using BigInt = mpz_class;

// Exact rational, always canonical (GMP keeps mpq in lowest terms once
// canonicalize() has run; every constructor here does so).
class Rational {
public:
    Rational() = default;
    Rational(long v) : q_(v) {}
    Rational(int v) : q_(v) {}
    Rational(std::int64_t num, std::int64_t den);
    Rational(const BigInt& num, const BigInt& den);
    explicit Rational(const BigInt& v) : q_(v) {}
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    static Rational parse(const std::string& s);  // "p/q" or "p"

    BigInt num() const { return q_.get_num(); }
    BigInt den() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    double to_double() const { return q_.get_d(); }
    long double to_long_double() const;
    std::string str() const;                   // "p/q", or "p" when integral
    std::string decimal(int digits = 15) const;  // convenience rendering only

    BigInt floor() const;
    BigInt ceil() const;
    int sign() const { return sgn(q_); }
    bool is_integer() const { return q_.get_den() == 1; }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

private:
    mpq_class q_;
};

Rational abs(const Rational& r);
Rational pow_int(const Rational& base, int e);  // e may be negative
Rational inv_pow(long d, int e);                // d^{-e}
BigInt ipow(long d, int e);

// Closed interval [lo, hi] with rational endpoints. Used wherever an infinite
// tail prevents an exact answer.
struct Enclosure {
    Rational lo;
    Rational hi;

    Enclosure() = default;
    explicit Enclosure(const Rational& v) : lo(v), hi(v) {}
    Enclosure(const Rational& l, const Rational& h) : lo(l), hi(h) {}

    bool exact() const { return lo == hi; }
    Rational width() const { return hi - lo; }
    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    const Rational& value() const;  // throws unless exact
};

Enclosure operator+(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a, const Enclosure& b);
Enclosure operator*(const Enclosure& a, const Enclosure& b);
Enclosure operator/(const Enclosure& a, const Enclosure& b);  // b must not straddle 0

}  // namespace chacon
