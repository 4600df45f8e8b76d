#include "chacon/exceptional.hpp"

#include "chacon/balanced.hpp"
#include "chacon/correlation.hpp"
#include "chacon/errors.hpp"
#include "chacon/parallel.hpp"

#include <cmath>
#include <functional>

namespace chacon {

double c0_criterion(int d, double c0) { return (1 + c0) * std::pow(d - 1.0, c0) / std::pow(c0, c0); }

ExceptionalConfig ExceptionalConfig::with_c0(int d, const Rational& c0) {
    if (d < 3 || d % 2 == 0) throw ConfigError("d must be odd and >= 3");
    if (c0 <= 0) throw ConfigError("C0 must be positive");
    ExceptionalConfig cfg;
    cfg.d = d;
    cfg.C0 = c0;
    cfg.c0_value = c0_criterion(d, c0.to_double());
    cfg.k1 = 1;
    while (!(c0 > pow_int(Rational(1, 2), cfg.k1 - 1))) ++cfg.k1;
    cfg.c = Rational(2 * d, d - 1);
    return cfg;
}

ExceptionalConfig ExceptionalConfig::for_d(int d) {
    int best = 0;
    for (int i = 1; i <= 200 && c0_criterion(d, i / 200.0) < 1.5; ++i) best = i;
    if (best == 0) throw ConfigError("no admissible C0 on the 1/200 grid");
    return with_c0(d, Rational(best, 200));
}

int ExceptionalConfig::p(int m) const {
    if (m < 1) throw DomainError("p_n needs m >= 1");
    Rational x = c * Rational(m);
    int e = 0;
    while (Rational(ipow(d, e + 1)) <= x) ++e;
    return e + 1;
}

int ExceptionalConfig::q(int m) const {
    if (m < 1) throw DomainError("q_n needs m >= 1");
    const double ld = std::log(static_cast<double>(d));
    double v = (1 + std::log(2.0) / ld) / std::log(2.0) * (std::log(static_cast<double>(m)) / ld);
    return 2 * static_cast<int>(std::floor(v)) + 1;
}

Localization scaled_localization(std::int64_t n, int k, const ParameterWord& w, const Rational& scale) {
    Localization loc = localization(n, k, w);
    loc.radius = loc.radius * Enclosure(scale);
    return loc;
}

Membership in_first_exceptional(const ParameterWord& w, int k, std::int64_t n, const ExceptionalConfig& cfg,
                                const Rational& radius_scale) {
    if (n < cfg.d) throw DomainError("first exceptional set needs n >= d");
    Localization loc = scaled_localization(n, k, w, radius_scale);
    Membership out;
    for (std::int64_t l = std::max<std::int64_t>(1, loc.ell_min()); l <= loc.ell_max(); ++l) {
        int N = floor_log(l, cfg.d);
        int b = balanced_expand(l, cfg.d).nonzero_count;
        if (Rational(b) <= cfg.C0 * Rational(N)) {
            out.member = true;
            out.witness = l;
            return out;
        }
    }
    return out;
}

bool second_set_defined(const ExceptionalConfig& cfg, int m) {
    return m >= 1 && m - cfg.q(m) - 1 >= 0 && cfg.q(m) > cfg.p(m);
}

std::vector<int> ell0_digits(const ExceptionalConfig& cfg, int m) {
    if (!second_set_defined(cfg, m)) throw ConfigError("l_0 needs m - q_n - 1 >= 0 and q_n > p_n");
    const int p = cfg.p(m), q = cfg.q(m), nu = (cfg.d - 1) / 2;
    // most significant first: nu, (-nu)^{m-q-1}, nu^{q-p}, (-nu)^p
    std::vector<int> msf{nu};
    msf.insert(msf.end(), static_cast<size_t>(m - q - 1), -nu);
    msf.insert(msf.end(), static_cast<size_t>(q - p), nu);
    msf.insert(msf.end(), static_cast<size_t>(p), -nu);
    // alternative placement: leading nu at a_m, the last run one longer
    if (cfg.ell0_top_at_m) msf.push_back(-nu);
    return std::vector<int>(msf.rbegin(), msf.rend());
}

std::int64_t ell0(const ExceptionalConfig& cfg, int m) {
    BalancedIndex b;
    b.d = cfg.d;
    b.digits = ell0_digits(cfg, m);
    return reconstruct(b);
}

bool in_block_set(std::int64_t ell, const ExceptionalConfig& cfg, int m) {
    if (ell < 0) return false;
    const std::int64_t period = ipow64(cfg.d, cfg.q(m)), width = ipow64(cfg.d, cfg.p(m));
    std::int64_t r = (ell - ell0(cfg, m)) % period;
    if (r < 0) r += period;
    return r <= width;
}

Membership in_second_exceptional(const ParameterWord& w, int k, std::int64_t n, const ExceptionalConfig& cfg) {
    if (n < 1) throw DomainError("second exceptional set needs n >= 1");
    const int m = floor_log(n, cfg.d);
    if (!second_set_defined(cfg, m)) throw ConfigError("second exceptional set undefined for m = " + std::to_string(m));
    Localization loc = localization(n, k, w);
    Membership out;
    for (std::int64_t l = loc.ell_min(); l <= loc.ell_max(); ++l)
        if (in_block_set(l, cfg, m)) {
            out.member = true;
            out.witness = l;
            return out;
        }
    return out;
}

int gamma_count(const ParameterWord& w, int m, int k1) {
    if (m < 1) throw DomainError("gamma_count needs m >= 1");
    int count = 0;
    for (int j = 0; j < m; ++j) {
        bool all_two = true;
        for (int i = 0; i < k1 && all_two; ++i) all_two = w.digit(j + i) == 2;
        count += all_two;
    }
    return count;
}

bool in_Mm(const ParameterWord& w, int m, int k1) {
    // Gamma_m >= 2 * 2^{-k1} m
    return (static_cast<std::int64_t>(gamma_count(w, m, k1)) << k1) >= 2LL * m;
}

Rational Mm_measure_exact(int m, int k1) {
    const int L = m + k1 - 1;
    if (L > 26) throw BudgetExceeded("M_m enumeration beyond 2^26 patterns");
    std::int64_t hits = 0;
    for (std::int64_t mask = 0; mask < (1LL << L); ++mask) {
        int gamma = 0;
        for (int j = 0; j < m; ++j) {
            std::int64_t block = ((1LL << k1) - 1) << j;
            gamma += (mask & block) == block;
        }
        hits += (static_cast<std::int64_t>(gamma) << k1) >= 2LL * m;
    }
    return Rational(BigInt(hits), BigInt(ipow(2, L)));
}

double first_set_bound(const ExceptionalConfig& cfg, int m, int k) {
    return (cfg.c.to_double() + 2) * m * std::pow(0.75, m) / std::pow(cfg.d, k);
}

namespace {

struct MeanSe {
    double mean = 0, se = 0;
};

MeanSe bernoulli_stats(std::size_t hits, std::size_t samples) {
    MeanSe r;
    double s = static_cast<double>(samples);
    r.mean = static_cast<double>(hits) / s;
    r.se = samples > 1 ? std::sqrt(r.mean * (1 - r.mean) / (s - 1)) : 0.0;
    return r;
}

}  // namespace

std::vector<ExceptionalRow> measure_estimates(int k, const std::vector<std::int64_t>& n_grid, std::size_t samples,
                                              std::uint64_t seed, const ExceptionalConfig& cfg) {
    if (samples < 1) throw ConfigError("measure estimates need at least one sample");
    const std::size_t G = n_grid.size();
    std::vector<std::vector<char>> w_hit(G, std::vector<char>(samples)), wc_hit = w_hit, mm_hit = w_hit;
    std::vector<std::vector<std::int64_t>> witness(G, std::vector<std::int64_t>(samples, -1));
    parallel_for(samples, [&](std::size_t i) {
        ParameterWord w = sample_fiber(cfg.d, seed, i);
        for (std::size_t g = 0; g < G; ++g) {
            const std::int64_t n = n_grid[g];
            const int m = floor_log(n, cfg.d);
            Membership a = in_first_exceptional(w, k, n, cfg);
            w_hit[g][i] = a.member;
            witness[g][i] = a.witness;
            wc_hit[g][i] = second_set_defined(cfg, m) && in_second_exceptional(w, k, n, cfg).member;
            mm_hit[g][i] = in_Mm(w, m, cfg.k1);
        }
    });
    std::vector<ExceptionalRow> rows;
    for (std::size_t g = 0; g < G; ++g) {
        ExceptionalRow r;
        r.n = n_grid[g];
        r.m = floor_log(r.n, cfg.d);
        r.samples = samples;
        std::size_t a = 0, b = 0, c = 0;
        for (std::size_t i = 0; i < samples; ++i) {
            a += w_hit[g][i];
            b += wc_hit[g][i];
            c += mm_hit[g][i];
            if (w_hit[g][i] && r.first_witness < 0) r.first_witness = witness[g][i];
        }
        auto sa = bernoulli_stats(a, samples), sb = bernoulli_stats(b, samples), sc = bernoulli_stats(c, samples);
        r.H_W = sa.mean;
        r.H_W_se = sa.se;
        r.second_defined = second_set_defined(cfg, r.m);
        r.H_Wcheck = r.second_defined ? sb.mean : NAN;
        r.H_Wcheck_se = r.second_defined ? sb.se : NAN;
        r.H_Mm = sc.mean;
        r.H_Mm_se = sc.se;
        r.H_Mm_exact = r.m + cfg.k1 - 1 <= 26 ? Mm_measure_exact(r.m, cfg.k1).to_double() : NAN;
        r.bound_W = first_set_bound(cfg, r.m, k);
        rows.push_back(r);
    }
    return rows;
}

CantorCount cantor_block_count(std::int64_t n, int k, const ExceptionalConfig& cfg) {
    const int d = cfg.d, m = floor_log(n, d);
    if (!second_set_defined(cfg, m)) throw ConfigError("block set undefined for m = " + std::to_string(m));
    const int p = cfg.p(m), q = cfg.q(m);
    const double dn = static_cast<double>(n), dk = std::pow(d, k);
    const double C3 = (cfg.c.to_double() + 2) * (d - 1) / std::pow(d, k + 1);
    const double delta = C3 * m / dn;
    auto phi = [&](double x) { return 1.0 / (dk * (x + 1)); };
    auto phi_inv = [&](double y) { return y <= 0 ? INFINITY : 1.0 / (dk * y) - 1; };
    // does [a, b] meet K_m (first m digits in {1,2})?
    std::function<bool(double, int, double, double)> meets = [&](double s, int t, double a, double b) {
        double len = std::pow(d, -t);
        if (s > b || s + len < a) return false;
        if (t == m) return true;
        for (int digit = 1; digit <= 2; ++digit)
            if (meets(s + digit * std::pow(d, -(t + 1)), t + 1, a, b)) return true;
        return false;
    };
    const double kmin = (1 - std::pow(d, -m)) / (d - 1), kmax = 2.0 / (d - 1) + std::pow(d, -m);
    const auto jlo = static_cast<std::int64_t>(std::floor(dn * (phi(kmax) - delta)));
    const auto jhi = static_cast<std::int64_t>(std::ceil(dn * (phi(kmin) + delta)));
    const std::int64_t period = ipow64(d, q), width = ipow64(d, p), base = ell0(cfg, m);
    std::int64_t r0 = (jlo - base) / period - 1;
    CantorCount out;
    for (std::int64_t r = r0;; ++r) {
        std::int64_t start = base + r * period;
        if (start > jhi) break;
        for (std::int64_t j = std::max<std::int64_t>(0, start); j <= start + width; ++j) {
            if (j < jlo || j > jhi) continue;
            double y = static_cast<double>(j) / dn;
            if (meets(0.0, 0, phi_inv(y + delta), phi_inv(y - delta))) ++out.count;
        }
    }
    out.bound = std::pow(2.0, -q) * std::pow(dn, std::log(2.0) / std::log(static_cast<double>(d)));
    return out;
}

}  // namespace chacon
