#include "chacon/spectral.hpp"

#include "chacon/errors.hpp"
#include "chacon/exceptional.hpp"
#include "chacon/rng.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <functional>

namespace chacon {

SpectralParams SpectralParams::defaults(int d) { return make(d, 0.5, 1.0); }

SpectralParams SpectralParams::make(int d, double delta, double a) {
    if (d < 3 || d % 2 == 0) throw ConfigError("d must be odd and >= 3");
    if (!(delta > 1.0 / d && delta < 1.0 - 2.0 / d)) throw ConfigError("delta outside (1/d, 1-2/d)");
    if (delta > (d - 1.0) / (d + 2.0)) throw ConfigError("delta above (d-1)/(d+2)");
    const double a_lo = 2.0 / (d * (1.0 - delta) - 1.0), a_hi = 1.0 / delta;
    if (!(a > a_lo && a < a_hi)) throw ConfigError("a outside (2/(d(1-delta)-1), 1/delta)");
    SpectralParams p;
    p.d = d;
    p.delta = delta;
    p.a = a;
    p.gamma = d * (1.0 - delta) / 4.0;
    return p;
}

UTable build_u_table(const BalancedIndex& ell, int j, int k, const ParameterWord& w, int depth) {
    const int d = w.d();
    if (depth < 1) throw DomainError("U table needs depth >= 1");
    UTable T;
    T.d = d;
    T.depth = depth;
    T.j = j;
    const size_t total = static_cast<size_t>(ipow64(d, depth));
    T.slot.assign(total, 4);
    if (j < 0 || ell.digit(j) == 0) {
        T.zero = true;
        return T;
    }
    Enclosure beta = beta_moment(w.shift(j), k, 1);
    T.mean = ell.digit(j) * (beta.lo.to_double() + beta.hi.to_double()) / 2;
    std::vector<int> prefix;
    std::int64_t undecided = 0;
    std::function<void(size_t, int)> fill = [&](size_t idx, int L) {
        if (auto v = summand_from_prefix(ell, j, w, k, prefix)) {
            const size_t stride = static_cast<size_t>(ipow64(d, L));
            for (size_t i = idx; i < total; i += stride) T.slot[i] = static_cast<std::uint8_t>(*v + 4);
            return;
        }
        if (L == depth) {
            T.slot[idx] = UTable::kUndecided;
            ++undecided;
            return;
        }
        const size_t step = static_cast<size_t>(ipow64(d, L));
        for (int c = 0; c < d; ++c) {
            prefix.push_back(c);
            fill(idx + static_cast<size_t>(c) * step, L + 1);
            prefix.pop_back();
        }
    };
    fill(0, 0);
    T.defect_mass = static_cast<double>(undecided) / static_cast<double>(total);
    return T;
}

std::vector<UTable> operator_tables(std::int64_t ell, int k, const ParameterWord& w, int depth, int count) {
    BalancedIndex b = balanced_expand(ell, w.d());
    std::vector<UTable> out;
    for (int j = 0; j < count; ++j) out.push_back(build_u_table(b, j, k, w, depth));
    return out;
}

LYResult lasota_yorke_check(const UTable& U, double t, const CylinderFunction<double>& g, const SpectralParams& p) {
    auto Lg = apply_operator(U, Cx<double>(0, t), g);
    LYResult r;
    r.lhs = Lg.osc_seminorm(p.delta);
    r.rhs = p.delta * g.osc_seminorm(p.delta) + 2.0 / p.d * g.sup_norm();
    r.pass = r.lhs <= r.rhs + 1e-12;
    return r;
}

std::vector<LYResult> lasota_yorke_batch(const UTable& U, const std::vector<double>& ts, const CylinderFunction<double>& g,
                                         const SpectralParams& p) {
    std::vector<Cx<double>> zs;
    for (double t : ts) zs.emplace_back(0, t);
    auto images = apply_operator_batch(U, zs, g);
    const double rhs = p.delta * g.osc_seminorm(p.delta) + 2.0 / p.d * g.sup_norm();
    std::vector<LYResult> out;
    for (const auto& Lg : images) {
        LYResult r;
        r.lhs = Lg.osc_seminorm(p.delta);
        r.rhs = rhs;
        r.pass = r.lhs <= r.rhs + 1e-12;
        out.push_back(r);
    }
    return out;
}

LYResult lasota_yorke_composed(const std::vector<UTable>& tables, double t, const CylinderFunction<double>& g,
                               const SpectralParams& p) {
    if (tables.empty()) throw DomainError("composed check needs at least one operator");
    const int depth = tables.front().depth;
    CylinderFunction<double> h = g.depth == depth ? g : g.embed(depth);
    for (const auto& U : tables) h = apply_operator(U, Cx<double>(0, t), h).embed(depth);
    LYResult r;
    r.lhs = h.osc_seminorm(p.delta);
    r.rhs = std::pow(p.delta, static_cast<double>(tables.size())) * g.osc_seminorm(p.delta) + p.beta() * g.sup_norm();
    r.pass = r.lhs <= r.rhs + 1e-12;
    return r;
}

namespace {

double unit_uniform(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53 * 2 - 1; }

}  // namespace

CylinderFunction<double> random_function(int d, int depth, std::uint64_t seed, std::uint64_t index, bool multiscale) {
    auto g = CylinderFunction<double>::constant(d, depth, Cx<double>(0));
    const std::uint64_t key = counter_hash(seed, kStreamFunctions, index);
    const size_t total = g.v.size();
    if (!multiscale) {
        for (size_t i = 0; i < total; ++i)
            g.v[i] = {unit_uniform(counter_hash(key, 0, 2 * i)), unit_uniform(counter_hash(key, 0, 2 * i + 1))};
        return g;
    }
    // sum_n 2^{-n} c_n(first n digits), with c_n uniform in the unit square;
    // built level by level: a child is its parent's value plus its own term
    std::vector<Cx<double>> level(1, Cx<double>(unit_uniform(counter_hash(key, 1, 0)), unit_uniform(counter_hash(key, 1, 1))));
    double scale = 1;
    for (int n = 1; n <= depth; ++n) {
        scale /= 2;
        const size_t parents = level.size();
        std::vector<Cx<double>> next(parents * static_cast<size_t>(d));
        for (size_t a = 0; a < next.size(); ++a)
            next[a] = level[a % parents] +
                      Cx<double>(scale * unit_uniform(counter_hash(key, static_cast<std::uint64_t>(n) + 1, 2 * a)),
                                 scale * unit_uniform(counter_hash(key, static_cast<std::uint64_t>(n) + 1, 2 * a + 1)));
        level.swap(next);
    }
    g.v.swap(level);
    return g;
}

ContractionTrace contraction_check(std::int64_t ell, int k, const ParameterWord& w, double t, int depth,
                                   const SpectralParams& p, int count) {
    BalancedIndex b = balanced_expand(ell, w.d());
    if (count < 0) count = static_cast<int>(b.digits.size());
    ContractionTrace tr;
    auto g = CylinderFunction<double>::constant(w.d(), depth, Cx<double>(1));
    tr.norms.push_back(g.balanced_norm(p));
    tr.sup_norms.push_back(g.sup_norm());
    for (int j = 0; j < count; ++j) {
        UTable U = build_u_table(b, j, k, w, depth);
        tr.defect_mass += U.defect_mass;
        auto h = apply_operator(U, Cx<double>(0, t), g);
        tr.norms.push_back(h.balanced_norm(p));
        tr.sup_norms.push_back(h.sup_norm());
        g = h.embed(depth);
    }
    // least squares slope of log norm against the checkpoint index
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(tr.norms.size());
    for (size_t s = 0; s < tr.norms.size(); ++s) {
        double x = static_cast<double>(s), y = std::log(std::max(tr.norms[s], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    tr.rate = n > 1 ? std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx)) : 1.0;
    return tr;
}

namespace {

template <class Real>
Cx<Real> composed_integral(const std::vector<UTable>& tables, const Cx<Real>& z, int d, int depth) {
    auto g = CylinderFunction<Real>::constant(d, depth, Cx<Real>(Real(1)));
    for (const auto& U : tables) g = apply_operator(U, z, g).embed(depth);
    return g.integral();
}

int digit_count(std::int64_t ell, int d) { return static_cast<int>(balanced_expand(ell, d).digits.size()); }

}  // namespace

CharacteristicValue characteristic_function(std::int64_t ell, int k, const ParameterWord& w, double t, int depth) {
    if (std::fabs(t) > M_PI + 1e-15) throw DomainError("characteristic function needs |t| <= pi");
    const int d = w.d();
    auto tables = operator_tables(ell, k, w, depth, digit_count(ell, d));
    CharacteristicValue cv;
    cv.t = t;
    for (const auto& U : tables) cv.defect_mass += U.defect_mass;
    cv.by_operator = composed_integral<double>(tables, Cx<double>(0, t), d, depth);
    ReturnDistribution dist = distribution(ell, k, w);
    const double mean = dist.mean().to_double();
    Cx<double> s;
    for (const auto& [n, pr] : dist.support) s += cexp(Cx<double>(0, t * (static_cast<double>(n) - mean))) * pr.to_double();
    cv.by_distribution = s;
    cv.truncation_mass = dist.truncation_mass.to_double();
    cv.difference = abs(cv.by_operator - cv.by_distribution);
    return cv;
}

Cx<double> characteristic_function_mp50(std::int64_t ell, int k, const ParameterWord& w, double t, int depth) {
    using R = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;
    const int d = w.d();
    auto tables = operator_tables(ell, k, w, depth, digit_count(ell, d));
    auto v = composed_integral<R>(tables, Cx<R>(R(0), R(t)), d, depth);
    return {static_cast<double>(v.re), static_cast<double>(v.im)};
}

EigenReport eigen_report(std::int64_t ell, int k, const ParameterWord& w, int depth, double h) {
    const int d = w.d();
    const int m = digit_count(ell, d);
    auto tables = operator_tables(ell, k, w, depth, m);
    EigenReport r;
    // differences of order 1e-8 need more than double precision
    using R = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;
    auto f = [&](double x) { return composed_integral<R>(tables, Cx<R>(R(x)), d, depth).re; };
    const R f0 = f(0), fp = f(h), fm = f(-h), fp2 = f(h / 2), fm2 = f(-h / 2), H(h);
    r.d1 = static_cast<double>((fp - fm) / (2 * H));
    r.d1_half = static_cast<double>((fp2 - fm2) / H);
    r.d2 = static_cast<double>((fp - 2 * f0 + fm) / (H * H));
    r.d2_half = static_cast<double>((fp2 - 2 * f0 + fm2) / (H * H / 4));
    for (const auto& U : tables) r.defect_mass += U.defect_mass;
    ReturnDistribution dist = distribution(ell, k, w);
    r.second_moment = dist.variance().to_double();
    r.remainder = r.d2 - r.second_moment;

    // eps0: scan t upward until some step ratio int L^{0,j+1}1 / int L^{0,j}1 leaves the 10% disk
    const int steps = 100;
    for (int i = 1; i <= steps; ++i) {
        const double t = M_PI * i / steps;
        auto g = CylinderFunction<double>::constant(d, depth, Cx<double>(1));
        Cx<double> prev(1);
        bool inside = true;
        for (const auto& U : tables) {
            g = apply_operator(U, Cx<double>(0, t), g).embed(depth);
            Cx<double> cur = g.integral();
            if (prev.norm2() == 0) {
                inside = false;
                break;
            }
            // cur / prev
            Cx<double> ratio = cur * prev.conj() * (1.0 / prev.norm2());
            if (abs(ratio - Cx<double>(1)) > 0.1) {
                inside = false;
                break;
            }
            prev = cur;
        }
        if (!inside) break;
        r.eps0 = t;
    }

    // surrogate eigenvectors h_j = L^{j-p,p}(1) / integral; residual of L^{(j)} h_j = lambda_j h_{j+1}
    r.residual_t = r.eps0 > 0 ? r.eps0 : M_PI / steps;
    const Cx<double> z(0, r.residual_t);
    const int lookback = 3;
    BalancedIndex b = balanced_expand(ell, d);
    auto surrogate = [&](int j) {
        auto g = CylinderFunction<double>::constant(d, depth, Cx<double>(1));
        for (int i = j - lookback; i < j; ++i) g = apply_operator(build_u_table(b, i, k, w, depth), z, g).embed(depth);
        Cx<double> s = g.integral();
        Cx<double> inv = s.conj() * (1.0 / s.norm2());
        for (auto& v : g.v) v = v * inv;
        return g;
    };
    auto hj = surrogate(0);
    for (int j = 0; j < m; ++j) {
        auto next = surrogate(j + 1);
        auto Lh = apply_operator(tables[static_cast<size_t>(j)], z, hj).embed(depth);
        Cx<double> lam = Lh.integral();
        double res = 0;
        for (size_t i = 0; i < Lh.v.size(); ++i) res = std::max(res, abs(Lh.v[i] - lam * next.v[i]));
        r.residual = std::max(r.residual, res);
        hj = std::move(next);
    }
    return r;
}

std::int64_t all_ones_index(int digits, int d) {
    std::int64_t v = 0;
    for (int j = 0; j < digits; ++j) v += ipow64(d, j);
    return v;
}

LLTReport llt_report(std::int64_t ell, int k, const ParameterWord& w) {
    const int d = w.d();
    LLTReport r;
    r.ell = ell;
    BalancedIndex b = balanced_expand(ell, d);
    r.m = b.top();
    r.nonzero = b.nonzero_count;
    r.gated = r.m >= 1 && Rational(b.nonzero_count) <= ExceptionalConfig::for_d(d).C0 * Rational(r.m);
    ReturnDistribution dist = distribution(ell, k, w);
    r.mean = dist.mean().to_double();
    r.sigma = std::sqrt(dist.variance().to_double());
    r.truncation_mass = dist.truncation_mass.to_double();
    if (r.sigma == 0) throw DomainError("degenerate distribution");
    const double norm = 1.0 / (r.sigma * std::sqrt(2 * M_PI));
    for (std::int64_t n = dist.min_value(); n <= dist.max_value(); ++n) {
        LLTRow row;
        row.n = n;
        row.exact = dist.prob(n);
        const double x = (static_cast<double>(n) - r.mean) / r.sigma;
        row.gaussian = norm * std::exp(-x * x / 2);
        row.error = std::fabs(row.exact.to_double() - row.gaussian);
        r.sup_error = std::max(r.sup_error, row.error);
        r.gaussian_sum += row.gaussian;
        r.rows.push_back(row);
    }
    r.m_sup_error = r.m * r.sup_error;
    return r;
}

std::vector<MDPRow> moderate_deviation_check(const std::vector<int>& m_grid, int k, const ParameterWord& w) {
    const int d = w.d();
    std::vector<MDPRow> rows;
    double C = 0;
    std::vector<ReturnDistribution> dists;
    for (int m : m_grid) {
        if (m < 1) throw DomainError("moderate deviations need m >= 1");
        MDPRow r;
        r.m = m;
        r.ell = all_ones_index(m, d);
        r.threshold = std::pow(static_cast<double>(m), 0.75);
        ReturnDistribution dist = distribution(r.ell, k, w);
        const Rational E = w.is_periodic() ? kac_mean(r.ell, k, w) : dist.mean();
        const Rational m3 = pow_int(Rational(m), 3);
        const double s = std::sqrt(static_cast<double>(m)), Ed = E.to_double();
        Rational tail(0), centered(0);
        for (const auto& [n, p] : dist.support) {
            Rational x = Rational(n) - E;
            centered += x * p;
            if (pow_int(x, 4) >= m3) tail += p;
            const double xd = static_cast<double>(n) - Ed;
            r.c_plus += p.to_double() * std::exp(xd / s);
            r.c_minus += p.to_double() * std::exp(-xd / s);
        }
        r.tail = tail;
        r.centered_mean = centered;
        C = std::max({C, r.c_plus, r.c_minus});
        rows.push_back(r);
    }
    for (auto& r : rows) {
        r.bound = 2 * C * std::exp(-std::pow(static_cast<double>(r.m), 0.25));
        r.pass = r.tail.to_double() <= r.bound;
    }
    return rows;
}

}  // namespace chacon
