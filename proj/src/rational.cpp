#include "chacon/rational.hpp"

#include "chacon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chacon {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    mpz_class n, q;
    mpz_set_si(n.get_mpz_t(), num);
    mpz_set_si(q.get_mpz_t(), den);
    q_ = mpq_class(n, q);
    q_.canonicalize();
}

Rational::Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational Rational::parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw ConfigError("cannot parse rational '" + s + "'");
    }
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.q_ == 0) throw DomainError("division by zero");
    q_ /= o.q_;
    return *this;
}

long double Rational::to_long_double() const {
    // Enough for rendering; split to avoid overflow of huge num/den.
    long e1 = 0, e2 = 0;
    double a = mpz_get_d_2exp(&e1, q_.get_num_mpz_t());
    double b = mpz_get_d_2exp(&e2, q_.get_den_mpz_t());
    return std::ldexp(static_cast<long double>(a) / b, static_cast<int>(e1 - e2));
}

std::string Rational::str() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::string Rational::decimal(int digits) const {
    mpf_class f(q_, 256);
    std::ostringstream os;
    os.precision(digits);
    os << f;
    return os.str();
}

BigInt Rational::floor() const {
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
}

BigInt Rational::ceil() const {
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

BigInt ipow(long d, int e) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(e));
    return r;
}

Rational inv_pow(long d, int e) {
    if (e >= 0) return Rational(BigInt(1), ipow(d, e));
    return Rational(ipow(d, -e));
}

Rational pow_int(const Rational& base, int e) {
    BigInt n, q;
    unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(n.get_mpz_t(), base.raw().get_num_mpz_t(), ue);
    mpz_pow_ui(q.get_mpz_t(), base.raw().get_den_mpz_t(), ue);
    return e < 0 ? Rational(q, n) : Rational(n, q);
}

const Rational& Enclosure::value() const {
    if (!exact()) throw DomainError("enclosure is not a single exact value");
    return lo;
}

Enclosure operator+(const Enclosure& a, const Enclosure& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Enclosure operator-(const Enclosure& a, const Enclosure& b) { return {a.lo - b.hi, a.hi - b.lo}; }

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
    Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

Enclosure operator/(const Enclosure& a, const Enclosure& b) {
    if (b.lo.sign() <= 0 && b.hi.sign() >= 0) throw DomainError("enclosure division by interval containing 0");
    return a * Enclosure(1 / b.hi, 1 / b.lo);
}

}  // namespace chacon
