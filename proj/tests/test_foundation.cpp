#include "doctest.h"

#include "chacon/balanced.hpp"
#include "chacon/cantor.hpp"
#include "chacon/errors.hpp"
#include "chacon/parameter_word.hpp"

#include <map>

using namespace chacon;

TEST_CASE("rational basics") {
    Rational a(6, 8);
    CHECK(a.str() == "3/4");
    CHECK(Rational::parse("-10/4") == Rational(-5, 2));
    CHECK(Rational(7, 2).floor() == 3);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).ceil() == -3);
    CHECK(inv_pow(7, 2) == Rational(1, 49));
    CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("alpha values of periodic words") {
    CHECK(alpha_value(ParameterWord::periodic(7, "1")).value() == Rational(1, 6));
    CHECK(alpha_value(ParameterWord::periodic(7, "2")).value() == Rational(1, 3));
    // hand sum: (1/7 + 2/49) / (1 - 1/49) = 9/48
    CHECK(alpha_value(ParameterWord::periodic(7, "12", "12")).value() == Rational(3, 16));
    // a base prefix followed by a tail: 2/7 + (1/49)(1/6)(7) ... checked against a long partial sum
    auto w = ParameterWord::periodic(7, "21", "1122");
    Rational exact = alpha_value(w).value();
    Rational partial = alpha_partial(w, 40);
    CHECK(exact > partial);
    CHECK(exact - partial < inv_pow(7, 40));
}

TEST_CASE("random words enclose their value and are stable") {
    auto w = ParameterWord::random(7, 99);
    auto e = alpha_value(w, 30);
    CHECK(e.lo < e.hi);
    CHECK(e.hi - e.lo == inv_pow(7, 30) / Rational(6));
    auto e2 = alpha_value(w, 40);
    CHECK(e.lo <= e2.lo);
    CHECK(e2.hi <= e.hi);
    for (int j = 0; j < 200; ++j) {
        CHECK(w.digit(j) == w.digit(j));
        CHECK(w.shift(5).digit(j) == w.digit(j + 5));
    }
    int twos = 0;
    for (int j = 0; j < 4000; ++j) twos += w.digit(j) == 2;
    CHECK(twos > 1800);
    CHECK(twos < 2200);
}

TEST_CASE("shift and memo keys") {
    auto w = ParameterWord::periodic(7, "12", "211");
    for (int p = 0; p < 10; ++p)
        for (int j = 0; j < 20; ++j) CHECK(w.shift(p).digit(j) == w.digit(j + p));
    CHECK(w.shift_key(3) == w.shift_key(5));
    CHECK(w.shift_key(1) != w.shift_key(3));
    // shifting the tail by its period leaves its value unchanged
    auto t = ParameterWord::periodic(7, "1221", "2");
    CHECK(alpha_value(t.shift(1)).value() == alpha_value(t.shift(5)).value());
}

TEST_CASE("parameter word strings") {
    auto w = ParameterWord::parse("d=7;base=121;tail=periodic:1");
    CHECK(w.digit(0) == 1);
    CHECK(w.digit(1) == 2);
    CHECK(w.digit(5) == 1);
    CHECK(ParameterWord::parse(w.str()).str() == w.str());
    auto r = ParameterWord::parse("tail=random:42");
    CHECK(r.tail_kind() == TailKind::Random);
    CHECK(ParameterWord::parse("random:42").digit(77) == r.digit(77));
    CHECK(ParameterWord::parse("periodic:21", 9).d() == 9);
    CHECK_THROWS_AS(ParameterWord::parse("periodic:13"), ConfigError);
    CHECK_THROWS_AS(ParameterWord::parse("d=8;tail=periodic:1"), ConfigError);
}

TEST_CASE("beta moments") {
    CHECK(beta_moment(ParameterWord::periodic(7, "1"), 0, 1).value() == Rational(1, 6));
    CHECK(beta_moment(ParameterWord::periodic(7, "2"), 0, 2).value() == Rational(2, 3));
    CHECK(beta_moment(ParameterWord::periodic(7, "21", "21"), 1, 1).value() == Rational(3, 16));
}

TEST_CASE("balanced expansion against brute-force digit search") {
    CHECK(balanced_expand(0, 7).digits.empty());
    CHECK(balanced_expand(4, 7).digits == std::vector<int>{-3, 1});
    CHECK(balanced_expand(10, 7).digits == std::vector<int>{3, 1});
    CHECK(balanced_expand(10, 7).nonzero_count == 2);
    CHECK_THROWS_AS(balanced_expand(3, 8), ConfigError);

    // every digit vector of length 5 with |a_j| <= 3; balanced expansions are unique
    std::map<long, std::vector<int>> table;
    std::vector<int> a(5, -3);
    while (true) {
        long v = 0;
        for (int j = 4; j >= 0; --j) v = v * 7 + a[static_cast<size_t>(j)];
        std::vector<int> trimmed = a;
        while (!trimmed.empty() && trimmed.back() == 0) trimmed.pop_back();
        CHECK(table.count(v) == 0);
        table[v] = trimmed;
        int j = 0;
        while (j < 5 && a[static_cast<size_t>(j)] == 3) a[static_cast<size_t>(j++)] = -3;
        if (j == 5) break;
        ++a[static_cast<size_t>(j)];
    }
    for (long l = 0; l <= 1000; ++l) CHECK(balanced_expand(l, 7).digits == table.at(l));
    for (int d : {7, 9})
        for (long l = 0; l <= 10000; ++l) {
            auto b = balanced_expand(l, d);
            REQUIRE(reconstruct(b) == l);
            for (int x : b.digits) REQUIRE(std::abs(x) <= (d - 1) / 2);
        }
}

TEST_CASE("odometer offsets are non-negative") {
    for (long l = 0; l < 3000; ++l) {
        auto b = balanced_expand(l, 7);
        for (int j = 0; j <= b.top(); ++j) REQUIRE(odometer_offset(b, j) >= 0);
    }
    // l = 4 = (-3, 1): q_0 = 7 - 3 = 4
    CHECK(odometer_offset(balanced_expand(4, 7), 0) == 4);
}

TEST_CASE("tower heights") {
    CHECK(tower_height(ParameterWord::periodic(7, "1"), 0) == 1);
    CHECK(tower_height(ParameterWord::periodic(7, "1"), 2) == 57);
    CHECK(tower_height(ParameterWord::periodic(7, "1", "21"), 2) == 64);
    for (auto w : {ParameterWord::periodic(7, "21", "1"), ParameterWord::random(7, 5), ParameterWord::periodic(9, "2")})
        for (int k = 0; k <= 12; ++k) {
            BigInt closed = ipow(w.d(), k);
            for (int i = 0; i < k; ++i) closed += ipow(w.d(), k - 1 - i) * w.digit(i);
            CHECK(tower_height(w, k) == closed);
        }
}

TEST_CASE("floor_log is exact at powers") {
    CHECK(floor_log(1, 7) == 0);
    CHECK(floor_log(6, 7) == 0);
    CHECK(floor_log(7, 7) == 1);
    CHECK(floor_log(48, 7) == 1);
    CHECK(floor_log(49, 7) == 2);
    CHECK(floor_log(ipow64(7, 20), 7) == 20);
    CHECK(floor_log(ipow64(7, 20) - 1, 7) == 19);
}

TEST_CASE("cantor measure") {
    CHECK(cantor_measure_of_interval(Rational(0), Rational(1), 7, 5).exact());
    CHECK(cantor_measure_of_interval(Rational(0), Rational(1), 7, 5).lo == 1);
    auto half = cantor_measure_of_interval(Rational(1, 7), Rational(2, 7), 7, 8);
    CHECK(half.lo == Rational(1, 2));
    CHECK(half.hi == Rational(1, 2));

    // enumeration oracle over all 2^8 words at depth 8
    Rational lo(0), hi(3, 14), in(0), meet(0);
    for (int mask = 0; mask < 256; ++mask) {
        Rational v(0);
        for (int j = 0; j < 8; ++j) v += Rational(1 + ((mask >> j) & 1)) * inv_pow(7, j + 1);
        auto hull = cantor_piece_hull(v, 8, 7);
        if (lo <= hull.lo && hull.hi <= hi) in += Rational(1, 256);
        if (!(hull.hi < lo || hull.lo > hi)) meet += Rational(1, 256);
    }
    auto e = cantor_measure_of_interval(lo, hi, 7, 8);
    CHECK(e.lo == in);
    CHECK(e.hi == meet);

    Enclosure prev = cantor_measure_of_interval(lo, hi, 7, 1);
    for (int depth = 2; depth <= 12; ++depth) {
        auto cur = cantor_measure_of_interval(lo, hi, 7, depth);
        CHECK(cur.lo >= prev.lo);
        CHECK(cur.hi <= prev.hi);
        CHECK(cur.lo <= cur.hi);
        prev = cur;
    }
}
