#pragma once
#include "chacon/balanced.hpp"
#include "chacon/errors.hpp"
#include "chacon/parameter_word.hpp"
#include "chacon/rational.hpp"
#include "chacon/return_dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace chacon {

// Window constants of the oscillation space: 1/d < delta < 1 - 2/d,
// delta <= (d-1)/(d+2), a in (2/(d(1-delta)-1), 1/delta), gamma = d(1-delta)/4.
struct SpectralParams {
    int d = 7;
    double delta = 0.5;
    double a = 1.0;
    double gamma = 0.875;
    static SpectralParams defaults(int d);
    static SpectralParams make(int d, double delta, double a);  // validates
    double beta() const { return 2.0 / (d * (1.0 - delta)); }
};

// U_j on depth-N cylinders: raw summand value (before centering) plus 4 per
// cell, little-endian index sum_t x_{t+1} d^t. Cylinders where a carry runs
// past depth N hold kUndecided and are treated as U = 0.
struct UTable {
    static constexpr std::uint8_t kUndecided = 9;
    int d = 7;
    int depth = 0;
    int j = 0;
    std::vector<std::uint8_t> slot;
    double mean = 0;          // E X_j = sgn(a_j)|a_j| beta_k(sigma^j alpha)
    double defect_mass = 0;   // Lebesgue mass of undecided cells, |a_j| d^{-N}
    bool zero = false;        // U_j = 0 (j < 0 or a_j = 0)
};

UTable build_u_table(const BalancedIndex& ell, int j, int k, const ParameterWord& w, int depth);

template <class Real>
struct Cx {
    Real re{0}, im{0};
    Cx() = default;
    Cx(Real r, Real i = Real(0)) : re(r), im(i) {}
    Cx operator+(const Cx& o) const { return {re + o.re, im + o.im}; }
    Cx operator-(const Cx& o) const { return {re - o.re, im - o.im}; }
    Cx operator*(const Cx& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    Cx operator*(const Real& s) const { return {re * s, im * s}; }
    Cx& operator+=(const Cx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Real norm2() const { return re * re + im * im; }
    Cx conj() const { return {re, -im}; }
};

template <class Real>
Real abs(const Cx<Real>& z) {
    using std::sqrt;
    return sqrt(z.norm2());
}

// exp(z) for complex z
template <class Real>
Cx<Real> cexp(const Cx<Real>& z) {
    using std::cos;
    using std::exp;
    using std::sin;
    Real m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

// g constant on depth-N cylinders.
template <class Real>
struct CylinderFunction {
    int d = 7;
    int depth = 0;
    std::vector<Cx<Real>> v;

    static CylinderFunction constant(int d, int depth, Cx<Real> c) {
        CylinderFunction g;
        g.d = d;
        g.depth = depth;
        g.v.assign(static_cast<size_t>(ipow64(d, depth)), c);
        return g;
    }
    Real sup_norm() const {
        Real best(0);
        for (const auto& z : v) best = std::max<Real>(best, z.norm2());
        using std::sqrt;
        return sqrt(best);
    }
    Cx<Real> integral() const {
        Cx<Real> s;
        for (const auto& z : v) s += z;
        return s * (Real(1) / Real(static_cast<double>(v.size())));
    }
    // same function seen at a larger depth
    CylinderFunction embed(int new_depth) const {
        if (new_depth < depth) throw DomainError("cannot embed into a smaller depth");
        CylinderFunction g;
        g.d = d;
        g.depth = new_depth;
        const size_t base = v.size(), total = static_cast<size_t>(ipow64(d, new_depth));
        g.v.resize(total);
        for (size_t i = 0; i < total; ++i) g.v[i] = v[i % base];
        return g;
    }
    // S_n = d^{-n} sum_{|a|=n} osc(g,[a]) for n = 0..depth (S_depth = 0).
    // With prune_delta > 0, levels that provably cannot raise
    // max_n prune_delta^{-n} S_n are skipped and reported as -1.
    std::vector<Real> oscillation_sums(double prune_delta = 0) const;
    Real osc_seminorm(double delta) const {
        auto S = oscillation_sums(delta);
        Real best(0), scale(1);
        const Real step = Real(1) / Real(delta);
        for (size_t n = 0; n < S.size(); ++n) {
            best = std::max<Real>(best, S[n] * scale);
            scale *= step;
        }
        return best;
    }
    Real balanced_norm(const SpectralParams& p) const {
        return std::max<Real>(sup_norm(), Real(p.gamma) * osc_seminorm(p.delta));
    }
};

namespace detail {

template <class Real>
Real cross(const Cx<Real>& o, const Cx<Real>& a, const Cx<Real>& b) {
    return (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
}

template <class Real>
bool lex_less(const Cx<Real>& a, const Cx<Real>& b) {
    return a.re < b.re || (a.re == b.re && a.im < b.im);
}

// Hull of lexicographically sorted points p[0..n): writes its vertices back
// into p in sorted order and returns (vertex count, diameter).
template <class Real>
std::pair<size_t, Real> sorted_hull(Cx<Real>* p, size_t n, std::vector<Cx<Real>>& chain) {
    size_t u = 0;
    for (size_t i = 0; i < n; ++i)
        if (u == 0 || p[i].re != p[u - 1].re || p[i].im != p[u - 1].im) p[u++] = p[i];
    n = u;
    if (n <= 2) return {n, n == 2 ? abs(p[1] - p[0]) : Real(0)};
    chain.resize(2 * n);
    size_t h = 0;
    for (size_t i = 0; i < n; ++i) {
        while (h >= 2 && cross(chain[h - 2], chain[h - 1], p[i]) <= 0) --h;
        chain[h++] = p[i];
    }
    const size_t lower = h;
    for (size_t i = n - 1; i-- > 0;) {
        while (h > lower && cross(chain[h - 2], chain[h - 1], p[i]) <= 0) --h;
        chain[h++] = p[i];
    }
    --h;  // the leftmost point closes the cycle
    Real best(0);
    for (size_t x = 0; x < h; ++x)
        for (size_t y = x + 1; y < h; ++y) best = std::max<Real>(best, (chain[x] - chain[y]).norm2());
    // lower chain ascending, upper interior descending: merge back to sorted order
    size_t i = 0, j = h, out = 0;
    while (i < lower || j > lower) {
        if (j == lower || (i < lower && lex_less(chain[i], chain[j - 1])))
            p[out++] = chain[i++];
        else
            p[out++] = chain[--j];
    }
    using std::sqrt;
    return {h, sqrt(best)};
}

// Drops points strictly inside the polygon of the extreme points in eight
// directions; such points are never hull vertices.
template <class Real>
void extreme_filter(std::vector<Cx<Real>>& pts) {
    if (pts.size() < 12) return;
    size_t ext[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    Real val[8];
    auto score = [](const Cx<Real>& p, int k) {
        switch (k) {
            case 0: return p.re;
            case 1: return p.re + p.im;
            case 2: return p.im;
            case 3: return p.im - p.re;
            case 4: return -p.re;
            case 5: return -p.re - p.im;
            case 6: return -p.im;
            default: return p.re - p.im;
        }
    };
    for (int k = 0; k < 8; ++k) val[k] = score(pts[0], k);
    for (size_t i = 1; i < pts.size(); ++i)
        for (int k = 0; k < 8; ++k) {
            Real x = score(pts[i], k);
            if (x > val[k]) {
                val[k] = x;
                ext[k] = i;
            }
        }
    Cx<Real> poly[8];
    int m = 0;
    for (int k = 0; k < 8; ++k) {
        const Cx<Real>& p = pts[ext[k]];
        if (m == 0 || p.re != poly[m - 1].re || p.im != poly[m - 1].im) poly[m++] = p;
    }
    while (m > 1 && poly[m - 1].re == poly[0].re && poly[m - 1].im == poly[0].im) --m;
    if (m < 3) return;
    size_t kept = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        bool inside = true;
        for (int e = 0; e < m; ++e) inside &= cross(poly[e], poly[(e + 1) % m], pts[i]) > 0;
        if (!inside) pts[kept++] = pts[i];
    }
    pts.resize(kept);
}

}  // namespace detail

// Bottom-up: the hull of [a] is the hull of its d children's hulls
// (children of a at length n are a + c d^n in the little-endian index).
// Hulls are kept as sorted vertex lists so parents merge instead of sorting.
//
// Pruning: each cell's diameter is at most its largest width over the four
// directions 0, 45, 90, 135 degrees divided by cos(pi/8). Widths aggregate
// cheaply, so levels whose bound cannot beat the running max are skipped and
// hulls are only built when some coarser level still needs an exact value.
template <class Real>
std::vector<Real> CylinderFunction<Real>::oscillation_sums(double prune_delta) const {
    using std::sqrt;
    std::vector<Real> S(static_cast<size_t>(depth) + 1, Real(0));
    if (depth == 0) return S;
    const bool prune = prune_delta > 0;
    const int top = depth - 1;

    // exact bottom level by pairwise distances of the d values
    {
        const size_t cells = static_cast<size_t>(ipow64(d, top));
        Real sum(0);
        for (size_t a = 0; a < cells; ++a) {
            Real m(0);
            for (int c = 0; c < d; ++c)
                for (int e = c + 1; e < d; ++e)
                    m = std::max<Real>(m, (v[a + static_cast<size_t>(c) * cells] - v[a + static_cast<size_t>(e) * cells]).norm2());
            sum += sqrt(m);
        }
        S[static_cast<size_t>(top)] = sum / Real(static_cast<double>(cells));
    }
    if (top == 0) return S;

    std::vector<Real> weight(S.size(), Real(1)), bound(S.size(), Real(0));
    Real best(0);
    if (prune) {
        for (size_t n = 1; n < S.size(); ++n) weight[n] = weight[n - 1] / Real(prune_delta);
        best = S[static_cast<size_t>(top)] * weight[static_cast<size_t>(top)];
        // projections onto the four directions, min and max per cell
        const Real r = Real(1) / sqrt(Real(2));
        const Real slack = Real(1) / Real(std::cos(M_PI / 8)) * Real(1 + 1e-12);
        std::vector<Real> lo, hi, next_lo, next_hi;
        for (int n = top; n >= 0; --n) {
            const size_t cells = static_cast<size_t>(ipow64(d, n));
            next_lo.resize(4 * cells);
            next_hi.resize(4 * cells);
            Real sum(0);
            for (size_t a = 0; a < cells; ++a) {
                Real mn[4] = {}, mx[4] = {};
                for (int c = 0; c < d; ++c) {
                    const size_t child = a + static_cast<size_t>(c) * cells;
                    Real l[4], h[4];
                    if (n == top) {
                        const Cx<Real>& x = v[child];
                        l[0] = h[0] = x.re;
                        l[1] = h[1] = x.im;
                        l[2] = h[2] = (x.re + x.im) * r;
                        l[3] = h[3] = (x.re - x.im) * r;
                    } else {
                        for (int k = 0; k < 4; ++k) {
                            l[k] = lo[4 * child + static_cast<size_t>(k)];
                            h[k] = hi[4 * child + static_cast<size_t>(k)];
                        }
                    }
                    for (int k = 0; k < 4; ++k) {
                        mn[k] = c == 0 ? l[k] : std::min<Real>(mn[k], l[k]);
                        mx[k] = c == 0 ? h[k] : std::max<Real>(mx[k], h[k]);
                    }
                }
                Real width(0);
                for (int k = 0; k < 4; ++k) {
                    next_lo[4 * a + static_cast<size_t>(k)] = mn[k];
                    next_hi[4 * a + static_cast<size_t>(k)] = mx[k];
                    width = std::max<Real>(width, mx[k] - mn[k]);
                }
                sum += width;
            }
            bound[static_cast<size_t>(n)] = sum / Real(static_cast<double>(cells)) * slack;
            lo.swap(next_lo);
            hi.swap(next_hi);
        }
    }
    // some level <= n may still exceed the running max
    auto needed_at_or_below = [&](int n) {
        if (!prune) return n >= 0;
        for (int m = n; m >= 0; --m)
            if (weight[static_cast<size_t>(m)] * bound[static_cast<size_t>(m)] > best) return true;
        return false;
    };
    for (int n = top - 1; n >= 0; --n) S[static_cast<size_t>(n)] = Real(-1);
    if (!needed_at_or_below(top - 1)) return S;

    std::vector<Cx<Real>> pts, next_pts, buf, tmp, chain;
    std::vector<std::uint32_t> off, next_off;
    std::vector<size_t> runs, next_runs;
    const size_t dd = static_cast<size_t>(d) * static_cast<size_t>(d);
    for (int n = top - 1; n >= 0; --n) {
        const size_t cells = static_cast<size_t>(ipow64(d, n));
        next_pts.resize(n == top - 1 ? cells * dd : pts.size());
        next_off.assign(cells + 1, 0);
        Real sum(0);
        size_t used = 0;
        for (size_t a = 0; a < cells; ++a) {
            buf.clear();
            if (n == top - 1) {
                // the d^2 values of the cell directly
                for (size_t m = 0; m < dd; ++m) buf.push_back(v[a + m * cells]);
                detail::extreme_filter(buf);
                std::sort(buf.begin(), buf.end(), detail::lex_less<Real>);
            } else {
                runs.assign(1, 0);
                for (int c = 0; c < d; ++c) {
                    size_t child = a + static_cast<size_t>(c) * cells;
                    for (std::uint32_t q = off[child]; q < off[child + 1]; ++q) buf.push_back(pts[q]);
                    runs.push_back(buf.size());
                }
                // pairwise merging of the sorted runs
                while (runs.size() > 2) {
                    tmp.resize(buf.size());
                    next_runs.assign(1, 0);
                    for (size_t r = 0; r + 1 < runs.size(); r += 2) {
                        size_t lo = runs[r], mid = runs[r + 1], hi = r + 2 < runs.size() ? runs[r + 2] : mid;
                        std::merge(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(mid),
                                   buf.begin() + static_cast<long>(mid), buf.begin() + static_cast<long>(hi),
                                   tmp.begin() + static_cast<long>(lo), detail::lex_less<Real>);
                        next_runs.push_back(hi);
                    }
                    buf.swap(tmp);
                    runs.swap(next_runs);
                }
            }
            auto [h, diam] = detail::sorted_hull(buf.data(), buf.size(), chain);
            sum += diam;
            for (size_t q = 0; q < h; ++q) next_pts[used++] = buf[q];
            next_off[a + 1] = static_cast<std::uint32_t>(used);
        }
        next_pts.resize(used);
        pts.swap(next_pts);
        off.swap(next_off);
        S[static_cast<size_t>(n)] = sum / Real(static_cast<double>(cells));
        best = std::max<Real>(best, S[static_cast<size_t>(n)] * weight[static_cast<size_t>(n)]);
        if (!needed_at_or_below(n - 1)) break;
    }
    return S;
}

// Weights e^{z (v - mean)} for raw values v in -4..4.
template <class Real>
std::vector<Cx<Real>> operator_weights(const UTable& U, const Cx<Real>& z) {
    std::vector<Cx<Real>> wt(9);
    for (int v = -4; v <= 4; ++v)
        wt[static_cast<size_t>(v + 4)] = U.zero ? Cx<Real>(Real(1)) : cexp(z * Real(v - U.mean));
    return wt;
}

// (1/d) sum_w e^{z U(wx)} g(wx); g is embedded at the table depth N first,
// the result has depth N - 1.
template <class Real>
CylinderFunction<Real> apply_operator(const UTable& U, const Cx<Real>& z, const CylinderFunction<Real>& g_in) {
    if (U.depth < 1) throw DomainError("operator needs depth >= 1");
    const CylinderFunction<Real>& g = g_in.depth == U.depth ? g_in : g_in.embed(U.depth);
    const int d = U.d;
    auto wt = operator_weights(U, z);
    wt.push_back(Cx<Real>(Real(1)));  // undecided cells
    const std::uint8_t* slot = U.slot.data();
    CylinderFunction<Real> out;
    out.d = d;
    out.depth = U.depth - 1;
    const size_t cells = static_cast<size_t>(ipow64(d, out.depth));
    out.v.resize(cells);
    const Real inv = Real(1) / Real(d);
    const Cx<Real>* gv = g.v.data();
    const Cx<Real>* wv = wt.data();
    for (size_t i = 0, idx = 0; i < cells; ++i) {
        Real re(0), im(0);
        for (int w = 0; w < d; ++w, ++idx) {
            const Cx<Real>& a = wv[slot[idx]];
            const Cx<Real>& b = gv[idx];
            re += a.re * b.re - a.im * b.im;
            im += a.re * b.im + a.im * b.re;
        }
        out.v[i] = Cx<Real>(re * inv, im * inv);
    }
    return out;
}

// One pass over g for several frequencies (g is read once; memory bound).
template <class Real>
std::vector<CylinderFunction<Real>> apply_operator_batch(const UTable& U, const std::vector<Cx<Real>>& zs,
                                                         const CylinderFunction<Real>& g_in) {
    if (U.depth < 1) throw DomainError("operator needs depth >= 1");
    const CylinderFunction<Real>& g = g_in.depth == U.depth ? g_in : g_in.embed(U.depth);
    const int d = U.d;
    const size_t F = zs.size();
    std::vector<Cx<Real>> wt(10 * F);
    for (size_t f = 0; f < F; ++f) {
        auto w = operator_weights(U, zs[f]);
        for (size_t s = 0; s < 9; ++s) wt[10 * f + s] = w[s];
        wt[10 * f + 9] = Cx<Real>(Real(1));
    }
    std::vector<CylinderFunction<Real>> out(F);
    const size_t cells = static_cast<size_t>(ipow64(d, U.depth - 1));
    for (auto& o : out) {
        o.d = d;
        o.depth = U.depth - 1;
        o.v.resize(cells);
    }
    const Real inv = Real(1) / Real(d);
    std::vector<Real> re(F), im(F);
    for (size_t i = 0, base = 0; i < cells; ++i, base += static_cast<size_t>(d)) {
        std::fill(re.begin(), re.end(), Real(0));
        std::fill(im.begin(), im.end(), Real(0));
        for (int w = 0; w < d; ++w) {
            const size_t idx = base + static_cast<size_t>(w);
            const Cx<Real>& b = g.v[idx];
            const Cx<Real>* a = wt.data() + U.slot[idx];
            for (size_t f = 0; f < F; ++f, a += 10) {
                re[f] += a->re * b.re - a->im * b.im;
                im[f] += a->re * b.im + a->im * b.re;
            }
        }
        for (size_t f = 0; f < F; ++f) out[f].v[i] = Cx<Real>(re[f] * inv, im[f] * inv);
    }
    return out;
}

struct OperatorSpec {
    ParameterWord w;
    std::int64_t ell = 0;
    int k = 0;
    int j = 0;
    double t = 0;  // z = i t
    int depth = 8;
    SpectralParams params;
    UTable table() const { return build_u_table(balanced_expand(ell, w.d()), j, k, w, depth); }
};

struct LYResult {
    double lhs = 0, rhs = 0;
    bool pass = false;
};

// |L g|_delta <= delta |g|_delta + (2/d) |g|_inf, tolerance 1e-12.
LYResult lasota_yorke_check(const UTable& U, double t, const CylinderFunction<double>& g, const SpectralParams& p);
// Same check at several frequencies sharing one pass over g.
std::vector<LYResult> lasota_yorke_batch(const UTable& U, const std::vector<double>& ts, const CylinderFunction<double>& g,
                                         const SpectralParams& p);
// |L^{j,n} g|_delta <= delta^n |g|_delta + beta |g|_inf over the tables given.
LYResult lasota_yorke_composed(const std::vector<UTable>& tables, double t, const CylinderFunction<double>& g,
                               const SpectralParams& p);

// Random test functions: iid cells, or multiscale sums sum_n rho^n c(a_n).
CylinderFunction<double> random_function(int d, int depth, std::uint64_t seed, std::uint64_t index, bool multiscale);

// Tables U_0 .. U_{count-1} for l.
std::vector<UTable> operator_tables(std::int64_t ell, int k, const ParameterWord& w, int depth, int count);

struct ContractionTrace {
    std::vector<double> norms;  // ||L^{0,s}(1)||_{delta,gamma}, s = 0..count
    std::vector<double> sup_norms;
    double rate = 0;            // fitted geometric factor per operator
    double defect_mass = 0;
};
ContractionTrace contraction_check(std::int64_t ell, int k, const ParameterWord& w, double t, int depth,
                                   const SpectralParams& p, int count = -1);

struct CharacteristicValue {
    double t = 0;
    Cx<double> by_operator;
    Cx<double> by_distribution;
    double difference = 0;
    double defect_mass = 0;      // sum of table defects
    double truncation_mass = 0;  // from the distribution
};
// E e^{it S_m}: m = number of balanced digits of l, so S_m = t' - E t'.
CharacteristicValue characteristic_function(std::int64_t ell, int k, const ParameterWord& w, double t, int depth);
// Same computation in 50-digit floating point (reference for rounding).
Cx<double> characteristic_function_mp50(std::int64_t ell, int k, const ParameterWord& w, double t, int depth);

struct EigenReport {
    double eps0 = 0;           // largest grid t with all step ratios within 10% of 1
    double d1 = 0, d1_half = 0;  // central differences of E L^{0,m}_z(1) at z = 0, steps h and h/2
    double d2 = 0, d2_half = 0;
    double mean = 0;           // E S_m (0 by centering)
    double second_moment = 0;  // E S_m^2 from the exact distribution
    double remainder = 0;      // d2 - E S_m^2
    double residual_t = 0;     // frequency of the residual check
    double defect_mass = 0;
    double residual = 0;       // sup_j |L h_j - lambda_j h_{j+1}|, h_j from a 3-step lookback
};
EigenReport eigen_report(std::int64_t ell, int k, const ParameterWord& w, int depth, double h = 1e-4);

struct LLTRow {
    std::int64_t n = 0;
    Rational exact;
    double gaussian = 0;
    double error = 0;
};
struct LLTReport {
    std::int64_t ell = 0;
    int m = 0;  // top digit index
    int nonzero = 0;
    bool gated = false;  // b_l <= C0 m
    double mean = 0, sigma = 0;
    double sup_error = 0;
    double m_sup_error = 0;
    double gaussian_sum = 0;
    double truncation_mass = 0;
    std::vector<LLTRow> rows;
};
LLTReport llt_report(std::int64_t ell, int k, const ParameterWord& w);
// l with digits a_0 = ... = a_m = 1.
std::int64_t all_ones_index(int digits, int d);

struct MDPRow {
    int m = 0;
    std::int64_t ell = 0;
    double threshold = 0;  // m^{3/4}
    Rational tail;         // lambda(|S_m| >= m^{3/4}) exactly
    double c_plus = 0, c_minus = 0;  // E e^{+-S_m/sqrt m}
    double bound = 0;      // 2 C e^{-m^{1/4}}
    bool pass = false;
    Rational centered_mean;  // sum (n - E) d'(n), exactly 0
};
// l = all_ones_index(m); C = largest c_plus/c_minus over the grid.
std::vector<MDPRow> moderate_deviation_check(const std::vector<int>& m_grid, int k, const ParameterWord& w);

}  // namespace chacon
