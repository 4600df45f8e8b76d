#include "chacon/correlation.hpp"

#include "chacon/balanced.hpp"
#include "chacon/errors.hpp"
#include "chacon/parallel.hpp"
#include "chacon/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chacon {

namespace {

double midpoint(const Enclosure& e) { return ((e.lo + e.hi) / Rational(2)).to_double(); }

double width(const Enclosure& e) { return (e.hi - e.lo).to_double(); }

}  // namespace

Enclosure lambda_Ak(int k, const ParameterWord& w, int depth) {
    return Enclosure(inv_pow(w.d(), k)) / (Enclosure(Rational(1)) + alpha_value(w, depth));
}

CorrelationSeries correlation_by_intervals(int k, const ParameterWord& w, std::int64_t n_max, int band_cap,
                                           std::size_t piece_budget) {
    if (k < 0 || n_max < 0) throw DomainError("correlation needs k >= 0 and n_max >= 0");
    CorrelationSeries out;
    out.k = k;
    out.alpha = w.str();
    out.method = "intervals";
    out.lambda = lambda_Ak(k, w);
    Enclosure inv = Enclosure(Rational(1)) / (Enclosure(Rational(1)) + alpha_value(w));
    FixedPointPropagator P(w, band_cap);
    const Rational top = inv_pow(w.d(), k);
    P.reset(IntervalSet::single(Rational(0), top));
    const auto top_units = P.from_rational(top);
    out.values.reserve(static_cast<std::size_t>(n_max) + 1);
    for (std::int64_t n = 0; n <= n_max; ++n) {
        if (n > 0) P.step();
        if (P.size() > piece_budget) {
            out.complete = false;
            break;
        }
        Rational m = P.to_rational(P.intersect_units(0, top_units));
        Rational defect = P.defect();
        out.values.push_back(Enclosure(m, m + defect) * inv);
        out.cutoff = n;
        out.error_mass = defect;
    }
    return out;
}

Enclosure correlation_at(std::int64_t n, DistributionEngine& engine) {
    const ParameterWord& w = engine.word();
    Enclosure lam = lambda_Ak(engine.k(), w);
    auto [first, last] = support_window(n, engine.k(), w);
    Rational sum(0), trunc(0);
    for (std::int64_t l = first; l <= last && first >= 0; ++l) {
        const ReturnDistribution& D = engine.get(l);
        sum += D.prob(n);
        trunc += D.truncation_mass;
    }
    return lam * Enclosure(sum, sum + trunc);
}

CorrelationSeries correlation_by_distributions(int k, const ParameterWord& w, std::int64_t n_max) {
    if (k < 0 || n_max < 0) throw DomainError("correlation needs k >= 0 and n_max >= 0");
    CorrelationSeries out;
    out.k = k;
    out.alpha = w.str();
    out.method = "distributions";
    out.lambda = lambda_Ak(k, w);
    DistributionEngine engine(w, k);
    // every l that can put mass on some n <= n_max lies below the window of n_max
    // (the window of n_max itself can be empty, so bound it directly)
    Enclosure A = Enclosure(Rational(ipow(w.d(), k))) * (Enclosure(Rational(1)) + alpha_value(w));
    const std::int64_t digits = static_cast<std::int64_t>(balanced_expand(2 * n_max + 16, w.d()).digits.size()) + 1;
    const std::int64_t l_max = (Rational(n_max + 4 * digits) / A.lo).ceil().get_si();
    std::vector<Rational> sum(static_cast<std::size_t>(n_max) + 1, Rational(0));
    Rational trunc(0);
    for (std::int64_t l = 0; l <= l_max; ++l) {
        const ReturnDistribution& D = engine.get(l);
        for (const auto& [n, p] : D.support) {
            if (n > n_max) break;
            if (n >= 0) sum[static_cast<std::size_t>(n)] += p;
        }
        trunc += D.truncation_mass;
    }
    out.values.reserve(sum.size());
    for (const auto& s : sum) out.values.push_back(out.lambda * Enclosure(s, s + trunc));
    out.cutoff = n_max;
    out.error_mass = trunc;
    return out;
}

CylinderSet CylinderSet::tower_level(const std::vector<int>& u, int k, std::int64_t j, int d) {
    if (static_cast<int>(u.size()) < k) throw DomainError("fiber cylinder shorter than k");
    if (j < 1 || j > ipow64(d, k)) throw DomainError("tower level index out of range");
    CylinderSet c;
    c.kind = Kind::TowerLevel;
    c.u = u;
    c.k = k;
    c.lo = Rational(j - 1) * inv_pow(d, k);
    c.hi = Rational(j) * inv_pow(d, k);
    return c;
}

CylinderSet CylinderSet::spacer_level(const std::vector<int>& u, int k, int stage, int copy, std::int64_t r, int d) {
    if (static_cast<int>(u.size()) < k) throw DomainError("fiber cylinder shorter than k");
    if (stage < 0 || stage >= k) throw DomainError("spacer stage must be < k");
    if (copy < 0 || copy >= u[static_cast<std::size_t>(stage)]) throw DomainError("spacer copy out of range");
    if (r < 0 || r >= ipow64(d, k - stage - 1)) throw DomainError("spacer sub-level out of range");
    Rational partial(0);
    for (int j = 0; j < stage; ++j) partial += Rational(u[static_cast<std::size_t>(j)]) * inv_pow(d, j + 1);
    CylinderSet c;
    c.kind = Kind::SpacerLevel;
    c.u = u;
    c.k = k;
    c.lo = Rational(1) + partial + Rational(copy) * inv_pow(d, stage + 1) + Rational(r) * inv_pow(d, k);
    c.hi = c.lo + inv_pow(d, k);
    return c;
}

bool CylinderSet::fiber_contains(const ParameterWord& w) const {
    for (std::size_t j = 0; j < u.size(); ++j)
        if (w.digit(static_cast<std::int64_t>(j)) != u[j]) return false;
    return true;
}

std::string CylinderSet::str() const {
    std::ostringstream os;
    os << (kind == Kind::TowerLevel ? "tower" : "spacer") << "[";
    for (int a : u) os << a;
    os << "]x[" << lo.str() << "," << hi.str() << ")";
    return os.str();
}

std::int64_t generator_level(const CylinderSet& a, ChaconMap& T) {
    if (!a.fiber_contains(T.word())) throw DomainError("alpha is outside the generator's fiber cylinder");
    const std::int64_t h = tower_height_i64(T.word(), a.k);
    Rational x(0);
    for (std::int64_t s = 0; s < h; ++s) {
        if (x == a.lo) return s;
        x = T.apply(x);
    }
    throw DomainError("interval is not a level of the tower: " + a.str());
}

Enclosure conditional_autocovariance(const CylinderSet& a, const ParameterWord& w, std::int64_t n) {
    if (n < 0) throw DomainError("negative time");
    ChaconMap T(w);
    generator_level(a, T);
    DistributionEngine engine(w, a.k);
    Enclosure lam = lambda_Ak(a.k, w);
    return correlation_at(n, engine) - lam * lam;
}

Enclosure autocovariance_by_intervals(const CylinderSet& a, const ParameterWord& w, std::int64_t n) {
    if (!a.fiber_contains(w)) throw DomainError("alpha is outside the generator's fiber cylinder");
    FixedPointPropagator P(w, 38);
    P.reset(IntervalSet::single(a.lo, a.hi));
    for (std::int64_t i = 0; i < n; ++i) P.step();
    Rational m = P.intersect_measure(a.lo, a.hi);
    Enclosure inv = Enclosure(Rational(1)) / (Enclosure(Rational(1)) + alpha_value(w));
    Enclosure lam = Enclosure(a.hi - a.lo) * inv;
    return Enclosure(m, m + P.defect()) * inv - lam * lam;
}

std::vector<std::int64_t> geometric_grid(int d, int first, int last) {
    std::vector<std::int64_t> g;
    for (int j = first; j <= last; ++j) {
        BigInt p = ipow(d, j), r;
        mpz_sqrt(r.get_mpz_t(), p.get_mpz_t());
        if (r * r != p) r += 1;
        g.push_back(r.get_si());
    }
    return g;
}

std::vector<std::int64_t> bin_members(std::int64_t g, int d, int points, double halfwidth) {
    if (points <= 1 || g == 0) return {g};
    const double f = std::pow(static_cast<double>(d), halfwidth);
    const auto lo = static_cast<std::int64_t>(std::ceil(static_cast<double>(g) / f));
    const auto hi = static_cast<std::int64_t>(std::floor(static_cast<double>(g) * f));
    std::vector<std::int64_t> out;
    for (int i = 0; i < points; ++i) {
        std::int64_t n = lo + (hi - lo) * i / (points - 1);
        if (out.empty() || out.back() != n) out.push_back(n);
    }
    return out;
}

ParameterWord sample_fiber(int d, std::uint64_t seed, std::size_t i) {
    return ParameterWord::random(d, counter_hash(seed, kStreamFiber, i));
}

ShearResult shear_experiment(const ShearOptions& opt) {
    if (opt.samples < 1) throw ConfigError("shear needs at least one sample");
    const std::size_t S = opt.samples, G = opt.n_grid.size();
    ShearResult res;
    res.grid_traces.assign(S, std::vector<double>(G, 0.0));
    res.spike_traces.assign(S, {});
    res.spike_ratio.assign(S, 0.0);
    std::vector<double> limit(S), widths(S, 0.0);
    parallel_for(S, [&](std::size_t i) {
        ParameterWord w = sample_fiber(opt.d, opt.seed, i);
        DistributionEngine engine(w, opt.k);
        Enclosure lam = lambda_Ak(opt.k, w);
        Enclosure lam2 = lam * lam;
        limit[i] = midpoint(lam2);
        auto cov = [&](std::int64_t n) {
            Enclosure c = correlation_at(n, engine) - lam2;
            widths[i] = std::max(widths[i], width(c));
            return std::fabs(midpoint(c));
        };
        for (std::size_t g = 0; g < G; ++g) {
            auto members = bin_members(opt.n_grid[g], opt.d, opt.bin_points, opt.bin_halfwidth);
            double acc = 0;
            for (auto n : members) acc += cov(n);
            res.grid_traces[i][g] = acc / static_cast<double>(members.size());
        }
        for (int q = opt.spike_first; q <= opt.spike_last; ++q)
            res.spike_traces[i].push_back(cov(tower_height_i64(w, q)));
        std::vector<double> all = res.grid_traces[i];
        all.insert(all.end(), res.spike_traces[i].begin(), res.spike_traces[i].end());
        std::sort(all.begin(), all.end());
        double med = all.size() % 2 ? all[all.size() / 2] : 0.5 * (all[all.size() / 2 - 1] + all[all.size() / 2]);
        res.spike_ratio[i] = med > 0 ? all.back() / med : INFINITY;
    });
    for (std::size_t g = 0; g < G; ++g) {
        double sum = 0, sq = 0;
        for (std::size_t i = 0; i < S; ++i) {
            sum += res.grid_traces[i][g];
            sq += res.grid_traces[i][g] * res.grid_traces[i][g];
        }
        ShearRow row;
        row.n = opt.n_grid[g];
        row.samples = S;
        row.mean_abs_cov = sum / static_cast<double>(S);
        double var = S > 1 ? (sq - sum * sum / static_cast<double>(S)) / static_cast<double>(S - 1) : 0.0;
        row.std_err = std::sqrt(std::max(0.0, var) / static_cast<double>(S));
        res.rows.push_back(row);
    }
    double lsum = 0;
    for (double v : limit) lsum += v;
    res.limit_mean = lsum / static_cast<double>(S);
    res.max_enclosure_width = *std::max_element(widths.begin(), widths.end());
    return res;
}

}  // namespace chacon
