#include "doctest.h"

#include "chacon/balanced.hpp"
#include "chacon/correlation.hpp"
#include "chacon/errors.hpp"
#include "chacon/exceptional.hpp"
#include "support.hpp"

#include <cmath>

using namespace chacon;

TEST_CASE("constants for d = 7") {
    auto cfg = ExceptionalConfig::for_d(7);
    CHECK(cfg.C0 == Rational(3, 40));
    CHECK(cfg.c0_value < 1.5);
    CHECK(c0_criterion(7, 0.08) >= 1.5);
    CHECK(cfg.k1 == 5);
    CHECK(cfg.c == Rational(7, 3));
    for (int m = 4; m <= 12; ++m) CHECK(cfg.q(m) > cfg.p(m));
    CHECK(cfg.p(5) == 2);
    CHECK(cfg.q(5) == 3);
    CHECK_FALSE(second_set_defined(cfg, 3));
    CHECK(second_set_defined(cfg, 4));
}

TEST_CASE("l_0 digit pattern") {
    auto cfg = ExceptionalConfig::for_d(7);
    // m = 5, p = 2, q = 3: 3, -3, 3, -3, -3 most significant first
    CHECK(ell0_digits(cfg, 5) == std::vector<int>{-3, -3, 3, -3, 3});
    CHECK(ell0(cfg, 5) == 3 * 2401 - 3 * 343 + 3 * 49 - 3 * 7 - 3);
    auto alt = cfg;
    alt.ell0_top_at_m = true;
    CHECK(ell0(alt, 5) == 7 * ell0(cfg, 5) - 3);
    CHECK_THROWS_AS(ell0(cfg, 3), ConfigError);
}

TEST_CASE("Gamma_m and M_m") {
    auto one = ParameterWord::periodic(7, "1"), two = ParameterWord::periodic(7, "2");
    CHECK(gamma_count(one, 8, 5) == 0);
    CHECK(gamma_count(two, 8, 5) == 8);
    CHECK(gamma_count(ParameterWord::periodic(7, "2211"), 8, 2) == 2);
    for (int m = 1; m <= 8; ++m) {
        CHECK(in_Mm(two, m, 5));
        CHECK_FALSE(in_Mm(one, m, 5));
    }
    CHECK(Mm_measure_exact(1, 1) == Rational(1, 2));
    // oracle by direct enumeration over words
    for (int m = 1; m <= 6; ++m)
        for (int k1 = 1; k1 <= 3; ++k1) {
            const int L = m + k1 - 1;
            std::int64_t hits = 0;
            for (int mask = 0; mask < (1 << L); ++mask) {
                std::string s;
                for (int j = 0; j < L; ++j) s += (mask >> j) & 1 ? '2' : '1';
                hits += in_Mm(ParameterWord::periodic(7, "1", s), m, k1);
            }
            CHECK(Mm_measure_exact(m, k1) == Rational(hits, std::int64_t{1} << L));
        }
}

TEST_CASE("first exceptional set") {
    auto cfg = ExceptionalConfig::for_d(7);
    auto one = ParameterWord::periodic(7, "1");
    // witness l = d^N with b_l = 1, N = ceil(1/C0) = 14
    const std::int64_t l = ipow64(7, 14);
    const std::int64_t n = (Rational(l) * Rational(7, 6)).floor().get_si();
    Membership a = in_first_exceptional(one, 0, n, cfg);
    REQUIRE(a.member);
    CHECK(localization(n, 0, one).contains(a.witness));
    int N = floor_log(a.witness, 7);
    CHECK(Rational(balanced_expand(a.witness, 7).nonzero_count) <= cfg.C0 * Rational(N));
    // at desk scale no l can have b_l <= C0 N < 1
    for (std::int64_t n2 : {49, 343, 2401, 16807, 117649, 823543}) CHECK_FALSE(in_first_exceptional(one, 0, n2, cfg).member);

    // exhaustive b_l scan with a larger C0 as the oracle, plus monotonicity in the radius
    auto loose = ExceptionalConfig::with_c0(7, Rational(1, 2));
    int members = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto w = sample_fiber(7, 3, i);
        std::int64_t n3 = 49 + static_cast<std::int64_t>(testing_support::sample_int(i, 200000));
        auto loc = localization(n3, 0, w);
        bool oracle = false;
        for (std::int64_t x = std::max<std::int64_t>(1, loc.ell_min()); x <= loc.ell_max(); ++x)
            oracle |= 2 * balanced_expand(x, 7).nonzero_count <= floor_log(x, 7);
        Membership m1 = in_first_exceptional(w, 0, n3, loose);
        CHECK(m1.member == oracle);
        members += m1.member;
        if (m1.member) CHECK(in_first_exceptional(w, 0, n3, loose, Rational(3, 2)).member);
    }
    CHECK(members > 0);
}

TEST_CASE("second exceptional set") {
    auto cfg = ExceptionalConfig::for_d(7);
    auto one = ParameterWord::periodic(7, "1");
    const int m = 5;
    const std::int64_t period = ipow64(7, cfg.q(m)), width = ipow64(7, cfg.p(m));
    // explicit block list as the oracle
    std::vector<char> block(ipow64(7, 6), 0);
    const std::int64_t base = ell0(cfg, m);
    for (std::int64_t r = -100; r <= 100; ++r)
        for (std::int64_t t = 0; t <= width; ++t) {
            std::int64_t x = base + r * period + t;
            if (x >= 0 && x < static_cast<std::int64_t>(block.size())) block[static_cast<size_t>(x)] = 1;
        }
    for (std::int64_t x = 0; x < 30000; ++x) CHECK(in_block_set(x, cfg, m) == static_cast<bool>(block[static_cast<size_t>(x)]));

    // witness built by division: l = l_0 + r d^q placed near 20000
    std::int64_t r = (20000 - base) / period;
    std::int64_t l = base + r * period;
    std::int64_t n = (Rational(l) * Rational(7, 6)).floor().get_si();
    REQUIRE(floor_log(n, 7) == m);
    Membership a = in_second_exceptional(one, 0, n, cfg);
    CHECK(a.member);
    CHECK(in_block_set(a.witness, cfg, m));

    // gap: I_n strictly between two blocks
    int gaps = 0;
    for (std::int64_t n2 = 16807; n2 < 117649 && gaps < 5; n2 += 37) {
        auto loc = localization(n2, 0, one);
        bool any = false;
        for (std::int64_t x = loc.ell_min(); x <= loc.ell_max(); ++x) any |= static_cast<bool>(block[static_cast<size_t>(x)]);
        CHECK(in_second_exceptional(one, 0, n2, cfg).member == any);
        gaps += !any;
    }
    CHECK(gaps > 0);
    CHECK_THROWS_AS(in_second_exceptional(one, 0, 343, cfg), ConfigError);
}

TEST_CASE("measure estimates") {
    auto cfg = ExceptionalConfig::for_d(7);
    std::vector<std::int64_t> grid{2401, 16807};
    auto small = measure_estimates(0, grid, 400, 1, cfg);
    auto large = measure_estimates(0, grid, 1600, 1, cfg);
    for (const auto& r : large) {
        CHECK(r.H_W >= 0);
        CHECK(r.H_W <= 1);
        CHECK(r.H_Wcheck >= 0);
        CHECK(r.H_Wcheck <= 1);
        CHECK(std::fabs(r.H_Mm - r.H_Mm_exact) <= 4 * r.H_Mm_se + 1e-12);
        CHECK(r.bound_W > 0);
    }
    // standard errors shrink like samples^{-1/2}
    double ratio = small[0].H_Wcheck_se / large[0].H_Wcheck_se;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
    auto again = measure_estimates(0, grid, 400, 1, cfg);
    CHECK(again[1].H_Wcheck == small[1].H_Wcheck);
}

TEST_CASE("cantor block count diagnostic") {
    auto cfg = ExceptionalConfig::for_d(7);
    auto c = cantor_block_count(16807, 0, cfg);
    CHECK(c.count >= 0);
    CHECK(c.bound == doctest::Approx(std::pow(2.0, 5 - 3)).epsilon(1e-9));
}
