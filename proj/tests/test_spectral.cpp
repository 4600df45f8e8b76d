#include "doctest.h"

#include "chacon/errors.hpp"
#include "chacon/spectral.hpp"

#include <cmath>

using namespace chacon;

namespace {

// osc over each length-n cylinder by direct pairwise comparison
std::vector<double> brute_oscillation(const CylinderFunction<double>& g) {
    std::vector<double> S;
    for (int n = 0; n <= g.depth; ++n) {
        const size_t cells = static_cast<size_t>(ipow64(g.d, n));
        double sum = 0;
        for (size_t a = 0; a < cells; ++a) {
            double best = 0;
            for (size_t i = a; i < g.v.size(); i += cells)
                for (size_t j = i; j < g.v.size(); j += cells) best = std::max(best, abs(g.v[i] - g.v[j]));
            sum += best;
        }
        S.push_back(sum / static_cast<double>(cells));
    }
    return S;
}

const std::int64_t kAllNonzero = 1 - 2 * 7 + 3 * 49 + 1 * 343 + 3 * 2401;  // digits 1,-2,3,1,3

}  // namespace

TEST_CASE("parameter window") {
    auto p = SpectralParams::defaults(7);
    CHECK(p.gamma == 0.875);
    CHECK(p.beta() == doctest::Approx(4.0 / 7));
    CHECK_THROWS_AS(SpectralParams::make(7, 0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(SpectralParams::make(7, 0.8, 1.0), ConfigError);
    CHECK_THROWS_AS(SpectralParams::make(7, 0.5, 3.0), ConfigError);
    CHECK_THROWS_AS(SpectralParams::make(7, 0.5, 0.5), ConfigError);
}

TEST_CASE("oscillation sums against pairwise scan") {
    for (int d : {3, 7})
        for (bool multi : {false, true}) {
            auto g = random_function(d, 3, 5, 1, multi);
            auto S = g.oscillation_sums();
            auto B = brute_oscillation(g);
            REQUIRE(S.size() == B.size());
            for (size_t n = 0; n < S.size(); ++n) CHECK(S[n] == doctest::Approx(B[n]).epsilon(1e-13));
            CHECK(S.back() == 0);
        }
    auto one = CylinderFunction<double>::constant(7, 4, Cx<double>(1));
    CHECK(one.osc_seminorm(0.5) == 0);
}

TEST_CASE("pruned seminorm equals the full scan") {
    auto w = ParameterWord::periodic(7, "1");
    BalancedIndex b = balanced_expand(kAllNonzero, 7);
    auto U = build_u_table(b, 2, 0, w, 6);
    for (std::uint64_t i = 0; i < 6; ++i) {
        auto g = random_function(7, 6, 8, i, i % 2);
        for (double delta : {0.2, 0.5, 0.7}) {
            auto S = g.oscillation_sums();
            double full = 0, scale = 1;
            for (double x : S) {
                full = std::max(full, x * scale);
                scale /= delta;
            }
            CHECK(g.osc_seminorm(delta) == full);
            auto Lg = apply_operator(U, Cx<double>(0, 1.0 + static_cast<double>(i)), g);
            auto SL = Lg.oscillation_sums();
            full = 0, scale = 1;
            for (double x : SL) {
                full = std::max(full, x * scale);
                scale /= delta;
            }
            CHECK(Lg.osc_seminorm(delta) == full);
        }
    }
}

TEST_CASE("batched operator matches single applications") {
    auto w = ParameterWord::periodic(7, "21");
    BalancedIndex b = balanced_expand(kAllNonzero, 7);
    auto U = build_u_table(b, 3, 1, w, 5);
    auto g = random_function(7, 5, 4, 0, false);
    std::vector<Cx<double>> zs{{0, 0.5}, {0, 2.0}, {0.1, -1.0}};
    auto batch = apply_operator_batch(U, zs, g);
    for (size_t f = 0; f < zs.size(); ++f) {
        auto one = apply_operator(U, zs[f], g);
        for (size_t x = 0; x < one.v.size(); ++x) {
            CHECK(batch[f].v[x].re == doctest::Approx(one.v[x].re).epsilon(1e-14));
            CHECK(batch[f].v[x].im == doctest::Approx(one.v[x].im).epsilon(1e-14));
        }
    }
}

TEST_CASE("operator basics") {
    auto w = ParameterWord::periodic(7, "1");
    BalancedIndex b = balanced_expand(kAllNonzero, 7);
    const int depth = 5;
    auto U = build_u_table(b, 1, 0, w, depth);
    // one undecided cylinder per return in the |a_j| term sum
    CHECK(U.defect_mass == doctest::Approx(2 * std::pow(7.0, -depth)));
    auto one = CylinderFunction<double>::constant(7, depth, Cx<double>(1));
    auto L1 = apply_operator(U, Cx<double>(0), one);
    for (const auto& z : L1.v) {
        CHECK(z.re == doctest::Approx(1).epsilon(1e-15));
        CHECK(z.im == 0);
    }
    auto neg = build_u_table(b, -2, 0, w, depth);
    CHECK(neg.zero);
    for (std::uint64_t i = 0; i < 50; ++i) {
        auto g = random_function(7, depth, 2, i, i % 2);
        auto Lg = apply_operator(U, Cx<double>(0), g);
        auto a = Lg.integral(), c = g.integral();
        CHECK(std::fabs(a.re - c.re) < 1e-13);
        CHECK(std::fabs(a.im - c.im) < 1e-13);
        // U = 0 for j < 0, so any z acts like z = 0
        auto Ln = apply_operator(neg, Cx<double>(0, 1.3), g);
        auto L0 = apply_operator(U, Cx<double>(0), g);
        auto Lz = apply_operator(neg, Cx<double>(0), g);
        for (size_t x = 0; x < Ln.v.size(); ++x) {
            CHECK(Ln.v[x].re == Lz.v[x].re);
            CHECK(Ln.v[x].im == Lz.v[x].im);
        }
        (void)L0;
        auto Lt = apply_operator(U, Cx<double>(0, 0.1 + 0.06 * static_cast<double>(i)), g);
        CHECK(Lt.sup_norm() <= g.sup_norm() + 1e-15);
    }
    CHECK_THROWS_AS(build_u_table(b, 0, 0, w, 0), DomainError);
}

TEST_CASE("Lasota-Yorke inequality") {
    auto w = ParameterWord::periodic(7, "21");
    auto p = SpectralParams::defaults(7);
    BalancedIndex b = balanced_expand(kAllNonzero, 7);
    const int depth = 5;
    auto one = CylinderFunction<double>::constant(7, depth, Cx<double>(1));
    auto r0 = lasota_yorke_check(build_u_table(b, 0, 0, w, depth), 0.0, one, p);
    CHECK(r0.lhs == 0);
    CHECK(r0.rhs == doctest::Approx(2.0 / 7));
    // for t != 0 the image of 1 is no longer constant
    auto r1 = lasota_yorke_check(build_u_table(b, 0, 0, w, depth), 2.0, one, p);
    CHECK(r1.lhs > 0);
    CHECK(r1.pass);
    std::vector<UTable> tables;
    for (int j = 0; j < 10; ++j) tables.push_back(build_u_table(b, j % 5, 0, w, depth));
    for (std::uint64_t i = 0; i < 12; ++i) {
        auto g = random_function(7, depth, 3, i, i % 2);
        for (double t : {0.3, 1.7, M_PI}) {
            CHECK(lasota_yorke_check(tables[i % 5], t, g, p).pass);
            std::vector<UTable> first(tables.begin(), tables.begin() + static_cast<long>(1 + i % 10));
            CHECK(lasota_yorke_composed(first, t, g, p).pass);
        }
    }
}

TEST_CASE("characteristic function by two methods") {
    for (auto w : {ParameterWord::periodic(7, "1"), ParameterWord::periodic(7, "21")})
        for (int k = 0; k <= 1; ++k) {
            auto c0 = characteristic_function(kAllNonzero, k, w, 0.0, 6);
            CHECK(c0.by_operator.re == doctest::Approx(1).epsilon(1e-13));
            CHECK(c0.by_distribution.re == doctest::Approx(1).epsilon(1e-13));
            for (std::int64_t ell : {1, 2, 8, 17, 30, 50}) {
                for (double t : {0.4, 2.5}) {
                    auto c = characteristic_function(ell, k, w, t, 6);
                    CHECK(c.difference <= 2 * c.defect_mass + c.truncation_mass + 1e-12);
                    auto cm = characteristic_function(ell, k, w, -t, 6);
                    CHECK(std::fabs(cm.by_operator.re - c.by_operator.re) < 1e-14);
                    CHECK(std::fabs(cm.by_operator.im + c.by_operator.im) < 1e-14);
                }
            }
        }
    auto one = ParameterWord::periodic(7, "1");
    auto c = characteristic_function(kAllNonzero, 0, one, 1.1, 5);
    auto mp = characteristic_function_mp50(kAllNonzero, 0, one, 1.1, 5);
    CHECK(std::fabs(mp.re - c.by_operator.re) < 1e-12);
    CHECK(std::fabs(mp.im - c.by_operator.im) < 1e-12);
}

TEST_CASE("contraction trajectory") {
    auto one = ParameterWord::periodic(7, "1");
    auto p = SpectralParams::defaults(7);
    auto flat = contraction_check(kAllNonzero, 0, one, 0.0, 6, p);
    for (double v : flat.norms) CHECK(v == doctest::Approx(1).epsilon(1e-13));
    auto tr = contraction_check(kAllNonzero, 0, one, M_PI, 6, p);
    for (size_t s = 1; s < tr.norms.size(); ++s) CHECK(tr.norms[s] < tr.norms[s - 1]);
    CHECK(tr.rate < 1);
}

TEST_CASE("eigen data by finite differences") {
    auto one = ParameterWord::periodic(7, "1");
    auto r = eigen_report(kAllNonzero, 0, one, 6);
    // undecided cells carry U = 0 instead of a summand value in -4..4
    CHECK(std::fabs(r.d1) <= 8 * r.defect_mass);
    CHECK(std::fabs(r.d2 - r.d2_half) < 1e-6);
    CHECK(std::fabs(r.remainder) <= 64 * r.defect_mass);
    CHECK(r.eps0 > 0);
    CHECK(r.eps0 < M_PI);
    CHECK(r.residual >= 0);
}

TEST_CASE("LLT report") {
    auto one = ParameterWord::periodic(7, "1");
    auto gated = llt_report(ipow64(7, 5), 0, one);
    // b = 1 stays above C0 m until m >= 14, so the gate is open here
    CHECK_FALSE(gated.gated);
    auto r = llt_report(all_ones_index(6, 7), 0, one);
    CHECK(r.m == 5);
    CHECK(r.nonzero == 6);
    CHECK_FALSE(r.gated);
    CHECK(r.gaussian_sum == doctest::Approx(1).epsilon(0.05));
    Rational total(0);
    for (const auto& row : r.rows) total += row.exact;
    CHECK(total == 1);
    CHECK(r.m_sup_error == doctest::Approx(r.m * r.sup_error));
}

TEST_CASE("moderate deviations") {
    auto one = ParameterWord::periodic(7, "1");
    auto rows = moderate_deviation_check({1, 2, 3}, 0, one);
    CHECK(rows[0].pass);
    CHECK(rows[0].tail <= 1);
    for (const auto& r : rows) {
        CHECK(r.centered_mean == 0);
        CHECK(r.c_plus >= 1);
    }
}
