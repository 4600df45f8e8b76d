// Acceptance checks, one per criterion: `acceptance --criterion N`.
// Prints informational lines, then one PASS/FAIL line with runtime and budget.

#include "CLI11.hpp"

#include "chacon/chacon_map.hpp"
#include "chacon/correlation.hpp"
#include "chacon/exceptional.hpp"
#include "chacon/return_dist.hpp"
#include "chacon/spectral.hpp"
#include "chacon/symbolic.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

using namespace chacon;
using testing_support::sample_point;

namespace {

std::vector<ParameterWord> both_words() { return {ParameterWord::periodic(7, "1"), ParameterWord::periodic(7, "21")}; }

template <class... Args>
void info(const char* fmt, Args... args) {
    std::printf("  info: ");
    std::printf(fmt, args...);
    std::printf("\n");
}

bool odometer_conjugacy() {
    long bad = 0, total = 0;
    for (const auto& w : both_words()) {
        ChaconMap T(w);
        for (int k = 0; k <= 2; ++k)
            for (std::uint64_t i = 0; i < 100; ++i) {
                Rational x = sample_point(i, Rational(0), inv_pow(7, k));
                bad += u_k(induced_map_on_base(T, x, k), k, 7) != ShiftPoint(u_k(x, k, 7), 7).odometer().value();
                ++total;
            }
    }
    info("%ld points, %ld mismatches", total, bad);
    return bad == 0;
}

bool tower_identity() {
    long bad = 0, total = 0;
    for (const auto& w : both_words()) {
        ChaconMap T(w);
        for (int k = 0; k <= 4; ++k) {
            auto h = tower_height_i64(w, k);
            for (std::uint64_t i = 0; i < 50; ++i) {
                Rational x = sample_point(i, Rational(0), inv_pow(7, k));
                Rational y = x;
                for (std::int64_t s = 0; s < h - 1; ++s) y = T.apply(y);
                bad += y != x + 1 - inv_pow(7, k);
                ++total;
            }
        }
    }
    info("%ld points up to k = 4, %ld mismatches", total, bad);
    return bad == 0;
}

bool triple_agreement() {
    long bad = 0, total = 0;
    for (const auto& w : both_words()) {
        ChaconMap T(w);
        for (int k = 0; k <= 2; ++k) {
            auto h = tower_height_i64(w, k);
            for (std::uint64_t i = 0; i < 10; ++i) {
                Rational x = sample_point(i, Rational(0), inv_pow(7, k));
                ShiftPoint y(u_k(x, k, 7), 7);
                auto geo = return_times(T, x, k, 60);
                for (std::int64_t l = 1; l <= 60; ++l) {
                    ReturnCocycle rc(l, k, h, w);
                    auto c = return_time_closed_form(rc, y);
                    bad += c != return_time_direct(rc, y) || c != geo[static_cast<size_t>(l - 1)];
                    ++total;
                }
            }
        }
    }
    info("%ld (point, l) pairs, %ld disagreements", total, bad);
    return bad == 0;
}

bool recursion_vs_oracle() {
    long bad = 0;
    Rational worst_trunc(0);
    for (const auto& w : both_words())
        for (int k = 0; k <= 1; ++k) {
            DistributionEngine eng(w, k);
            for (std::int64_t l = 0; l <= 50; ++l) {
                const auto& rec = eng.get(l);
                auto bf = brute_force_distribution(l, k, w, 12);
                Rational disc(0);
                for (const auto& [n, p] : rec.support) disc += abs(p - bf.prob(n));
                for (const auto& [n, p] : bf.support)
                    if (!rec.support.count(n)) disc += p;
                Rational allowed = bf.truncation_mass + rec.truncation_mass;
                bad += rec.total() != 1 || disc > allowed;
                worst_trunc = std::max(worst_trunc, bf.truncation_mass);
            }
        }
    info("oracle depth 12; largest oracle truncation mass %s (= %.3g, 50 * 7^-12 = %.3g)", worst_trunc.str().c_str(),
         worst_trunc.to_double(), 50 * std::pow(7.0, -12));
    info("%ld cases over the allowed discrepancy", bad);
    return bad == 0;
}

bool correlation_identity() {
    long bad = 0;
    for (const auto& w : both_words())
        for (auto [k, N] : {std::pair<int, std::int64_t>(0, 1000), {1, 3000}}) {
            auto a = correlation_by_intervals(k, w, N);
            auto b = correlation_by_distributions(k, w, N);
            long local = !a.complete;
            for (std::int64_t n = 0; n <= N; ++n) {
                const auto& x = a.values[static_cast<size_t>(n)];
                const auto& y = b.values[static_cast<size_t>(n)];
                local += x.hi < y.lo || y.hi < x.lo;
            }
            info("%s k=%d n<=%lld: %ld disagreements, interval defect %.3g, distribution truncation %.3g",
                 w.str().c_str(), k, static_cast<long long>(N), local, a.error_mass.to_double(),
                 b.error_mass.to_double());
            bad += local;
        }
    return bad == 0;
}

bool kac() {
    long bad = 0;
    for (const auto& w : both_words())
        for (int k = 0; k <= 2; ++k) {
            DistributionEngine eng(w, k);
            for (std::int64_t l = 0; l <= 200; ++l) bad += eng.get(l).mean() != kac_mean(l, k, w);
        }
    info("l <= 200, k <= 2, both words: %ld mismatches", bad);
    return bad == 0;
}

std::int64_t from_digits(const std::vector<int>& a) {
    std::int64_t l = 0;
    for (size_t j = a.size(); j-- > 0;) l = l * 7 + a[j];
    return l;
}

bool bounds_battery() {
    // indices with nine balanced digits; the first family keeps |a_j| <= 1
    std::vector<std::int64_t> unit_family, large_family;
    unit_family.push_back(from_digits({1, 1, 1, 1, 1, 1, 1, 1, 1}));
    unit_family.push_back(from_digits({1, -1, 1, -1, 1, -1, 1, -1, 1}));
    unit_family.push_back(from_digits({-1, 1, 0, 1, 1, -1, 0, 1, 1}));
    for (std::uint64_t s = 0; s < 3; ++s) {
        std::vector<int> a(9);
        for (int j = 0; j < 9; ++j) a[static_cast<size_t>(j)] = static_cast<int>(testing_support::sample_int(s * 9 + static_cast<std::uint64_t>(j), 3)) - 1;
        a[8] = 1;
        unit_family.push_back(from_digits(a));
    }
    large_family.push_back(from_digits({2, -3, 2, -3, 2, -3, 2, -3, 2}));
    large_family.push_back(from_digits({3, 3, 3, 3, 3, 3, 3, 3, 3}));

    long cov_bad = 0, cov_total = 0, cov_large_bad = 0;
    double worst_large = 0;
    for (const auto& w : both_words()) {
        auto run = [&](std::int64_t l, bool large) {
            for (int i = 1; i <= 8; ++i)
                for (int j = 0; j < i; ++j) {
                    Enclosure c = pairwise_covariance(i, j, l, 0, w, 10);
                    Rational bound = covariance_bound(i, j, w.max_digit(), 7);
                    Rational worst = std::max(abs(c.lo), abs(c.hi));
                    if (large) {
                        cov_large_bad += worst > bound;
                        worst_large = std::max(worst_large, (worst / bound).to_double());
                    } else {
                        cov_bad += worst > bound;
                        ++cov_total;
                    }
                }
        };
        for (auto l : unit_family) run(l, false);
        for (auto l : large_family) run(l, true);
    }
    info("covariance bound, digits |a_j| <= 1: %ld of %ld pairs violate", cov_bad, cov_total);
    info("covariance bound, digits |a_j| >= 2 (not asserted): %ld violations, worst ratio %.3f", cov_large_bad,
         worst_large);

    long var_bad = 0, var_total = 0, lb_bad = 0, lb_total = 0;
    const Rational per_term(5, 36);
    for (const auto& w : both_words()) {
        std::map<std::pair<std::int64_t, int>, Rational> by_shift;  // (|a|, i) -> V(X_i)
        for (int k = 0; k <= 1; ++k) {
            DistributionEngine eng(w, k);
            for (std::int64_t l = 1; l <= 500; ++l) {
                auto b = balanced_expand(l, 7);
                lb_bad += !variance_lower_bound_holds(eng.get(l).variance(), b.nonzero_count, w.max_digit(), 7);
                ++lb_total;
                if (k) continue;
                for (int i = 0; i <= b.top(); ++i) {
                    int a = b.digit(i);
                    if (!a) continue;
                    auto key = std::make_pair(static_cast<std::int64_t>(std::abs(a)), i % static_cast<int>(w.period_length()));
                    auto it = by_shift.find(key);
                    if (it == by_shift.end()) it = by_shift.emplace(key, summand_variance(l, i, 0, w)).first;
                    var_bad += it->second < per_term;
                    ++var_total;
                }
            }
        }
    }
    info("per-term variance >= 5/36: %ld of %ld nonzero digits violate", var_bad, var_total);
    info("variance lower bound in b_l: %ld of %ld distributions violate", lb_bad, lb_total);
    return cov_bad == 0 && var_bad == 0 && lb_bad == 0;
}

bool lasota_yorke() {
    auto p = SpectralParams::defaults(7);
    auto tables = operator_tables(7680, 0, ParameterWord::periodic(7, "1"), 8, 5);
    std::vector<double> ts;
    for (int f = 0; f < 10; ++f) ts.push_back(M_PI * (f + 1) / 10);
    long bad = 0;
    double worst = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto g = random_function(7, 8, 42, i, i % 2);
        for (const auto& r : lasota_yorke_batch(tables[i % 5], ts, g, p)) {
            bad += !r.pass;
            worst = std::max(worst, r.lhs / r.rhs);
        }
    }
    info("100 depth-8 functions x 10 frequencies: %ld violations, largest lhs/rhs %.4f", bad, worst);
    return bad == 0;
}

bool llt_trend() {
    auto w = ParameterWord::periodic(7, "1");
    double lo = INFINITY, hi = 0;
    for (int m = 4; m <= 7; ++m) {
        auto r = llt_report(all_ones_index(m + 1, 7), 0, w);
        info("m=%d l=%lld sigma=%.4f sup gap=%.5g m*sup=%.4f gaussian mass=%.4f gated=%d", r.m,
             static_cast<long long>(r.ell), r.sigma, r.sup_error, r.m_sup_error, r.gaussian_sum, r.gated);
        lo = std::min(lo, r.m_sup_error);
        hi = std::max(hi, r.m_sup_error);
    }
    info("max/min of m*sup = %.3f (needs < 3)", hi / lo);
    return hi / lo < 3;
}

bool exceptional_decay() {
    auto cfg = ExceptionalConfig::for_d(7);
    std::vector<std::int64_t> grid;
    for (int j = 2; j <= 7; ++j) grid.push_back(ipow64(7, j));
    auto rows = measure_estimates(0, grid, 2000, 42, cfg);
    info("C0 = %s, k1 = %d", cfg.C0.str().c_str(), cfg.k1);
    bool ok = true;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        info("n=%lld m=%d H_W=%.4g+-%.2g bound=%.4g H_Wcheck=%s H_Mm=%.4g (exact %.4g)", static_cast<long long>(r.n),
             r.m, r.H_W, r.H_W_se, r.bound_W,
             r.second_defined ? std::to_string(r.H_Wcheck).c_str() : "undefined", r.H_Mm, r.H_Mm_exact);
        ok = ok && r.H_W <= r.bound_W;
        if (i) {
            const auto& p = rows[i - 1];
            ok = ok && r.H_W <= p.H_W + 3 * std::hypot(r.H_W_se, p.H_W_se);
        }
    }
    return ok;
}

bool shear() {
    ShearOptions opt;
    opt.n_grid = geometric_grid(7, 4, 12);
    opt.samples = 200;
    opt.seed = 42;
    opt.bin_points = 32;
    auto r = shear_experiment(opt);
    for (const auto& row : r.rows)
        info("n=%lld mean|cov|=%.5g se=%.2g", static_cast<long long>(row.n), row.mean_abs_cov, row.std_err);
    double first = r.rows.front().mean_abs_cov, last = r.rows.back().mean_abs_cov;
    auto ratios = r.spike_ratio;
    std::sort(ratios.begin(), ratios.end());
    double median = ratios[ratios.size() / 2];
    info("decay ratio last/first = %.3f (needs <= 0.5)", last / first);
    info("per-fiber max/median over the trace: median fiber %.2f, smallest %.2f (needs > 3)", median, ratios.front());
    info("largest enclosure width %.3g", r.max_enclosure_width);
    return last <= 0.5 * first && median > 3;
}

bool moderate_deviations() {
    auto rows = moderate_deviation_check({3, 4, 5, 6, 7}, 0, ParameterWord::periodic(7, "1"));
    bool ok = true;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        info("m=%d l=%lld tail=%.4g bound=%.4g C+=%.4f C-=%.4f", r.m, static_cast<long long>(r.ell), r.tail.to_double(),
             r.bound, r.c_plus, r.c_minus);
        if (i) ok = ok && r.tail < rows[i - 1].tail;
    }
    return ok;
}

struct Criterion {
    const char* name;
    double budget;
    std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    int which = 0;
    app.add_option("--criterion", which, "criterion number 1..12")->required();
    CLI11_PARSE(app, argc, argv);

    const std::map<int, Criterion> criteria = {
        {1, {"odometer conjugacy", 10, odometer_conjugacy}},
        {2, {"tower identity", 10, tower_identity}},
        {3, {"return-time triple agreement", 60, triple_agreement}},
        {4, {"distribution recursion vs cylinder oracle", 300, recursion_vs_oracle}},
        {5, {"correlation by intervals and by distributions", 600, correlation_identity}},
        {6, {"Kac mean", 30, kac}},
        {7, {"bounds battery", 300, bounds_battery}},
        {8, {"Lasota-Yorke inequality", 120, lasota_yorke}},
        {9, {"local limit trend", 600, llt_trend}},
        {10, {"exceptional-set decay", 600, exceptional_decay}},
        {11, {"keplerian shear", 900, shear}},
        {12, {"moderate deviations", 300, moderate_deviations}},
    };
    auto it = criteria.find(which);
    if (it == criteria.end()) {
        std::fprintf(stderr, "unknown criterion %d\n", which);
        return 2;
    }
    const auto& c = it->second;
    std::printf("criterion %d: %s\n", which, c.name);
    std::fflush(stdout);
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = c.run();
    } catch (const std::exception& e) {
        info("exception: %s", e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.budget;
    std::printf("%s criterion %d: %s (%.1f s, budget %.0f s%s)\n", ok && in_time ? "PASS" : "FAIL", which, c.name, secs,
                c.budget, in_time ? "" : ", over budget");
    return ok && in_time ? 0 : 1;
}
