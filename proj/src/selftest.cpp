#include "chacon/selftest.hpp"

#include "chacon/chacon_map.hpp"
#include "chacon/correlation.hpp"
#include "chacon/return_dist.hpp"
#include "chacon/rng.hpp"
#include "chacon/spectral.hpp"
#include "chacon/symbolic.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace chacon {

namespace {

Rational point(std::uint64_t i, const Rational& lo, const Rational& hi) {
    std::uint64_t h = counter_hash(99, kStreamPoints, i);
    long den = 1000 + static_cast<long>(h % 100000);
    long num = static_cast<long>((h >> 20) % static_cast<std::uint64_t>(den));
    return lo + (hi - lo) * Rational(num, den);
}

std::vector<ParameterWord> words() { return {ParameterWord::periodic(7, "1"), ParameterWord::periodic(7, "21")}; }

CheckResult check(const std::string& name, const std::function<long()>& count_failures) {
    CheckResult r{name, false, ""};
    try {
        long bad = count_failures();
        r.pass = bad == 0;
        r.detail = std::to_string(bad) + " failures";
    } catch (const std::exception& e) {
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

}  // namespace

std::vector<CheckResult> run_selftest() {
    std::vector<CheckResult> out;
    out.push_back(check("induced map conjugate to the odometer", [] {
        long bad = 0;
        for (const auto& w : words()) {
            ChaconMap T(w);
            for (int k = 0; k <= 2; ++k)
                for (std::uint64_t i = 0; i < 10; ++i) {
                    Rational x = point(i, Rational(0), inv_pow(7, k));
                    bad += u_k(induced_map_on_base(T, x, k), k, 7) != ShiftPoint(u_k(x, k, 7), 7).odometer().value();
                }
        }
        return bad;
    }));
    out.push_back(check("tower identity", [] {
        long bad = 0;
        for (const auto& w : words()) {
            ChaconMap T(w);
            for (int k = 0; k <= 3; ++k)
                for (std::uint64_t i = 0; i < 5; ++i) {
                    Rational x = point(i, Rational(0), inv_pow(7, k));
                    bad += T.orbit(x, tower_height_i64(w, k) - 1).back() != x + 1 - inv_pow(7, k);
                }
        }
        return bad;
    }));
    out.push_back(check("return times by map, direct sum and closed form", [] {
        long bad = 0;
        for (const auto& w : words()) {
            ChaconMap T(w);
            for (int k = 0; k <= 1; ++k) {
                auto h = tower_height_i64(w, k);
                for (std::uint64_t i = 0; i < 3; ++i) {
                    Rational x = point(i, Rational(0), inv_pow(7, k));
                    ShiftPoint y(u_k(x, k, 7), 7);
                    auto geo = return_times(T, x, k, 20);
                    for (std::int64_t l = 1; l <= 20; ++l) {
                        ReturnCocycle rc(l, k, h, w);
                        auto c = return_time_closed_form(rc, y);
                        bad += c != return_time_direct(rc, y) || c != geo[static_cast<size_t>(l - 1)];
                    }
                }
            }
        }
        return bad;
    }));
    out.push_back(check("distribution recursion against the cylinder oracle", [] {
        long bad = 0;
        for (const auto& w : words()) {
            DistributionEngine eng(w, 0);
            for (std::int64_t l = 0; l <= 10; ++l) {
                const auto& rec = eng.get(l);
                auto bf = brute_force_distribution(l, 0, w, 7);
                Rational disc(0);
                for (const auto& [n, p] : rec.support) disc += abs(p - bf.prob(n));
                bad += rec.total() != 1 || disc > bf.truncation_mass + rec.truncation_mass;
            }
        }
        return bad;
    }));
    out.push_back(check("Kac mean and variance lower bound", [] {
        long bad = 0;
        for (const auto& w : words()) {
            DistributionEngine eng(w, 0);
            for (std::int64_t l = 1; l <= 60; ++l) {
                const auto& r = eng.get(l);
                auto b = balanced_expand(l, 7);
                bad += r.mean() != kac_mean(l, 0, w);
                bad += !variance_lower_bound_holds(r.variance(), b.nonzero_count, w.max_digit(), 7);
            }
        }
        return bad;
    }));
    out.push_back(check("correlation by intervals and by distributions", [] {
        long bad = 0;
        for (const auto& w : words()) {
            auto a = correlation_by_intervals(0, w, 150);
            auto b = correlation_by_distributions(0, w, 150);
            for (size_t n = 0; n < a.values.size(); ++n)
                bad += a.values[n].hi < b.values[n].lo || b.values[n].hi < a.values[n].lo;
        }
        return bad;
    }));
    out.push_back(check("Lasota-Yorke inequality", [] {
        long bad = 0;
        auto p = SpectralParams::defaults(7);
        auto tables = operator_tables(7680, 0, ParameterWord::periodic(7, "1"), 5, 5);
        for (std::uint64_t i = 0; i < 6; ++i) {
            auto g = random_function(7, 5, 42, i, i % 2);
            for (const auto& r : lasota_yorke_batch(tables[i % 5], {0.5, 1.5, 3.0}, g, p)) bad += !r.pass;
        }
        return bad;
    }));
    out.push_back(check("characteristic function by operator and by distribution", [] {
        long bad = 0;
        for (const auto& w : words())
            for (std::int64_t l : {3, 17, 50})
                for (double t : {0.4, 2.5}) {
                    auto c = characteristic_function(l, 0, w, t, 6);
                    bad += c.difference > 2 * c.defect_mass + c.truncation_mass + 1e-12;
                }
        return bad;
    }));
    return out;
}

}  // namespace chacon
