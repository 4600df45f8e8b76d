#include "chacon/return_dist.hpp"

#include "chacon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace chacon {

Rational ReturnDistribution::prob(std::int64_t n) const {
    auto it = support.find(n);
    return it == support.end() ? Rational(0) : it->second;
}

Rational ReturnDistribution::total() const {
    Rational s(0);
    for (const auto& [n, p] : support) s += p;
    return s;
}

Rational ReturnDistribution::mean() const {
    Rational s(0);
    for (const auto& [n, p] : support) s += Rational(n) * p;
    return s;
}

Rational ReturnDistribution::variance() const {
    Rational mu = mean(), s(0);
    for (const auto& [n, p] : support) {
        Rational dev = Rational(n) - mu;
        s += dev * dev * p;
    }
    return s;
}

std::int64_t ReturnDistribution::min_value() const {
    if (support.empty()) throw DomainError("empty distribution");
    return support.begin()->first;
}

std::int64_t ReturnDistribution::max_value() const {
    if (support.empty()) throw DomainError("empty distribution");
    return support.rbegin()->first;
}

ReturnDistribution epsilon_distribution(const ParameterWord& w, int k, int depth) {
    const int d = w.d();
    ParameterWord ws = w.shift(k);
    ReturnDistribution r;
    r.ell = 1;
    r.k = k;
    r.h = 0;
    r.alpha = w.str();
    r.support[0] = Rational(d - 2, d - 1);
    for (int v = 1; v <= 2; ++v) {
        Enclosure e = digit_series(ws, [v](int a) { return Rational(a == v ? 1 : 0); }, depth);
        if (e.lo.sign() > 0) r.support[v] = e.lo;
    }
    r.truncation_mass = w.is_periodic() ? Rational(0) : inv_pow(d, depth) / Rational(d - 1);
    return r;
}

DistributionEngine::DistributionEngine(ParameterWord w, int k, int eps_depth, size_t support_cap)
    : w_(std::move(w)), k_(k), h_(tower_height_i64(w_, k)), eps_depth_(eps_depth), support_cap_(support_cap) {
    if (k < 0) throw DomainError("negative k");
}

const ReturnDistribution& DistributionEngine::eps_at(std::int64_t s) {
    std::int64_t key = w_.shift_key(k_ + s);
    auto it = eps_.find(key);
    if (it != eps_.end()) return it->second;
    return eps_.emplace(key, epsilon_distribution(w_, static_cast<int>(k_ + s), eps_depth_)).first->second;
}

const ReturnDistribution& DistributionEngine::node(std::int64_t ell, std::int64_t s) {
    if (ell < 0) throw DomainError("negative return index");
    auto key = std::make_pair(ell, w_.shift_key(k_ + s));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    ReturnDistribution r;
    r.ell = ell;
    r.k = k_;
    r.h = h_;
    r.alpha = w_.str();
    r.shift_level = s;
    const int d = w_.d();
    if (ell == 0) {
        r.support[0] = Rational(1);
    } else if (ell == 1) {
        const ReturnDistribution& e = eps_at(s);
        for (const auto& [v, p] : e.support) r.support[h_ + v] = p;
        r.truncation_mass = e.truncation_mass;
    } else {
        const std::int64_t L = ell / d, q = ell % d, a = w_.digit(k_ + s), h = h_;
        // (child index, shift) -> number of first digits x_1 leading there
        std::map<std::pair<std::int64_t, std::int64_t>, int> branches;
        for (int x1 = 0; x1 < d; ++x1) {
            if (q == 0 || q + x1 <= d - 2) ++branches[{L, ((d - 1) * L + q) * h + L * a}];
            else if (q + x1 == d - 1) ++branches[{L, ((d - 1) * L + q) * h + (L + 1) * a}];
            else if (x1 <= d - 2) ++branches[{L + 1, ((d - 1) * L + q - 1) * h + (L + 1) * a}];
            else ++branches[{L + 1, ((d - 1) * L + q - 1) * h + L * a}];
        }
        r.truncation_mass = Rational(0);
        for (const auto& [br, count] : branches) {
            const ReturnDistribution& child = node(br.first, s + 1);
            Rational wgt(count, d);
            for (const auto& [v, p] : child.support) r.support[v + br.second] += wgt * p;
            r.truncation_mass += wgt * child.truncation_mass;
        }
    }
    if (r.support.size() > support_cap_)
        throw BudgetExceeded("distribution support exceeds cap at l=" + std::to_string(ell));
    return memo_.emplace(key, std::move(r)).first->second;
}

ReturnDistribution distribution(std::int64_t ell, int k, const ParameterWord& w, int eps_depth) {
    DistributionEngine e(w, k, eps_depth);
    return e.get(ell);
}

namespace {

// eps read from the low digits of R (little-endian, P digits known);
// returns -1 when all P digits are d-1.
int eps_read(__int128 R, int P, int d, const ParameterWord& w, int k) {
    for (int t = 0; t < P; ++t) {
        int dig = static_cast<int>(R % d);
        if (dig <= d - 3) return 0;
        if (dig == d - 2) return w.digit(k + t);
        R /= d;
    }
    return -1;
}

__int128 pow128(int d, int e) {
    __int128 r = 1;
    for (int i = 0; i < e; ++i) r *= d;
    return r;
}

}  // namespace

ReturnDistribution brute_force_distribution(std::int64_t ell, int k, const ParameterWord& w, int depth) {
    const int d = w.d();
    if (depth <= 0) {
        int lg = 0;
        for (std::int64_t p = 1; p < ell; p *= d) ++lg;
        depth = std::max(12, lg + 8);
    }
    if (depth * std::log2(static_cast<double>(d)) > 120) throw BudgetExceeded("brute-force depth too large");
    const std::int64_t h = tower_height_i64(w, k);
    ReturnDistribution r;
    r.ell = ell;
    r.k = k;
    r.h = h;
    r.alpha = w.str();
    std::map<std::int64_t, BigInt> counts;  // in units of d^{-depth}
    BigInt undecided = 0;

    struct Node {
        __int128 W;  // little-endian prefix value
        int L;
    };
    std::vector<Node> stack{{0, 0}};
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        __int128 DL = pow128(d, nd.L);
        bool decided = DL - 1 - nd.W >= ell;
        if (decided) {
            std::int64_t t = ell * h;
            for (std::int64_t i = 0; i < ell; ++i) {
                int e = eps_read((nd.W + i) % DL, nd.L, d, w, k);
                if (e < 0) throw std::logic_error("brute force: decided cylinder read past its prefix");
                t += e;
            }
            counts[t] += ipow(d, depth - nd.L);
        } else if (nd.L == depth) {
            undecided += 1;
        } else {
            for (int x = d - 1; x >= 0; --x) stack.push_back({nd.W + DL * x, nd.L + 1});
        }
    }
    BigInt denom = ipow(d, depth);
    for (const auto& [t, c] : counts) r.support[t] = Rational(c, denom);
    r.truncation_mass = Rational(undecided, denom);
    return r;
}

Rational kac_mean(std::int64_t ell, int k, const ParameterWord& w) {
    return Rational(ell) * Rational(ipow(w.d(), k)) * (1 + alpha_value(w).value());
}

Moments moments(std::int64_t ell, int k, const ParameterWord& w) {
    if (!w.is_periodic()) throw DomainError("exact moments need a periodic tail");
    ReturnDistribution r = distribution(ell, k, w);
    return {r.mean(), r.variance()};
}

bool variance_lower_bound_holds(const Rational& variance, int nonzero_count, int max_digit, int d) {
    // V >= (1 - 2a/sqrt(P)) B  <=>  2aB/sqrt(P) >= B - V
    Rational B = Rational(d - 2, (d - 1) * (d - 1)) * Rational(nonzero_count);
    Rational gap = B - variance;
    if (gap.sign() <= 0) return true;
    Rational lhs = Rational(4 * max_digit * max_digit) * B * B / Rational((d - 1) * (d - 2));
    return lhs >= gap * gap;
}

double variance_lower_bound(int nonzero_count, int max_digit, int d) {
    return (1 - 2.0 * max_digit / std::sqrt(static_cast<double>((d - 1) * (d - 2)))) * (d - 2) /
           static_cast<double>((d - 1) * (d - 1)) * nonzero_count;
}

std::optional<int> summand_from_prefix(const BalancedIndex& ell, int j, const ParameterWord& w, int k,
                                       const std::vector<int>& prefix) {
    int a = ell.digit(j);
    if (a == 0) return 0;
    const int d = w.d();
    const int P = static_cast<int>(prefix.size());
    __int128 Z = 0;
    for (int t = P - 1; t >= 0; --t) Z = Z * d + prefix[static_cast<size_t>(t)];
    __int128 DP = pow128(d, P), q = odometer_offset(ell, j);
    ParameterWord wj = w.shift(j);
    int s = 0;
    for (int t = 0; t < std::abs(a); ++t) {
        int e = eps_read((Z + q + t) % DP, P, d, wj, k);
        if (e < 0) return std::nullopt;
        s += e;
    }
    return sgn(a) * s;
}

namespace {

// E[X_i | first digits of sigma^i x = prefix], enclosed; extends the prefix
// until X_i is decided or `limit` digits are fixed.
Enclosure conditional_summand_mean(const BalancedIndex& b, int i, const ParameterWord& w, int k,
                                   std::vector<int>& prefix, int limit) {
    const int d = w.d();
    if (auto v = summand_from_prefix(b, i, w, k, prefix)) return Enclosure(Rational(*v));
    if (static_cast<int>(prefix.size()) >= limit) return Enclosure(Rational(-4), Rational(4));
    Enclosure acc(Rational(0));
    for (int x = 0; x < d; ++x) {
        prefix.push_back(x);
        acc = acc + conditional_summand_mean(b, i, w, k, prefix, limit);
        prefix.pop_back();
    }
    return acc * Enclosure(Rational(1, d));
}

Enclosure summand_mean(const BalancedIndex& b, int idx, const ParameterWord& w, int k) {
    int a = b.digit(idx);
    return Enclosure(Rational(a)) * beta_moment(w.shift(idx), k, 1);
}

}  // namespace

Enclosure pairwise_covariance(int i, int j, std::int64_t ell, int k, const ParameterWord& w, int depth) {
    if (i < j || j < 0) throw DomainError("pairwise_covariance needs i >= j >= 0");
    const int d = w.d();
    BalancedIndex b = balanced_expand(ell, d);
    const int gap = i - j, total = gap + depth;
    Enclosure mean_i = summand_mean(b, i, w, k), mean_j = summand_mean(b, j, w, k);
    // Walk prefixes of y = sigma^j x until X_j is decided. Digits of y
    // before position `gap` do not influence X_i, so short prefixes pair X_j
    // with the unconditional mean of X_i.
    Enclosure joint(Rational(0));
    std::vector<int> p;
    std::function<void(const Rational&)> walk = [&](const Rational& mass) {
        auto xj = summand_from_prefix(b, j, w, k, p);
        const int L = static_cast<int>(p.size());
        if (!xj) {
            if (L == total) {
                joint = joint + Enclosure(Rational(-16), Rational(16)) * Enclosure(mass);
                return;
            }
            for (int x = 0; x < d; ++x) {
                p.push_back(x);
                walk(mass / Rational(d));
                p.pop_back();
            }
            return;
        }
        if (*xj == 0) return;
        Enclosure ei = mean_i;
        if (gap == 0) ei = Enclosure(Rational(*xj));
        else if (L > gap) {
            std::vector<int> t(p.begin() + gap, p.end());
            ei = conditional_summand_mean(b, i, w, k, t, depth);
        }
        joint = joint + Enclosure(Rational(*xj) * mass) * ei;
    };
    walk(Rational(1));
    return joint - mean_i * mean_j;
}

Rational summand_variance(std::int64_t ell, int i, int k, const ParameterWord& w) {
    int a = balanced_expand(ell, w.d()).digit(i);
    if (a == 0) return Rational(0);
    DistributionEngine eng(w.shift(i), k);
    const ReturnDistribution& r = eng.get(std::abs(a));
    if (r.truncation_mass.sign() != 0) throw DomainError("summand variance needs an exact distribution");
    return r.variance();
}

Rational covariance_bound(int i, int j, int max_digit, int d) {
    return Rational(max_digit * max_digit) * inv_pow(d, i - j) / Rational(d - 1);
}

bool Localization::contains(std::int64_t ell) const {
    Rational l(ell);
    return lo() <= l && l <= hi();
}

std::int64_t Localization::ell_min() const {
    BigInt c = lo().ceil();
    if (c < 0) c = 0;
    return c.get_si();
}

std::int64_t Localization::ell_max() const { return hi().floor().get_si(); }

Localization localization(std::int64_t n, int k, const ParameterWord& w, int depth) {
    if (n < 1) throw DomainError("localization needs n >= 1");
    const int d = w.d();
    Localization loc;
    loc.n = n;
    loc.m = floor_log(n, d);
    Enclosure A = Enclosure(Rational(ipow(d, k))) * (Enclosure(Rational(1)) + alpha_value(w, depth));
    Rational c(2 * d, d - 1);
    loc.center = Enclosure(Rational(n)) / A;
    loc.radius = Enclosure(Rational(loc.m) * (c + 2)) / A;
    return loc;
}

std::pair<std::int64_t, std::int64_t> support_window(std::int64_t n, int k, const ParameterWord& w, int depth) {
    const int d = w.d();
    if (n == 0) return {0, 0};
    Enclosure A = Enclosure(Rational(ipow(d, k))) * (Enclosure(Rational(1)) + alpha_value(w, depth));
    const std::int64_t D = static_cast<std::int64_t>(balanced_expand(2 * n + 16, d).digits.size()) + 1;
    BigInt lo = (Rational(n - 4 * D) / A.hi).floor(), hi = (Rational(n + 4 * D) / A.lo).ceil();
    std::int64_t first = -1, last = -2;
    for (std::int64_t l = std::max<std::int64_t>(0, lo.get_si()); l <= hi.get_si(); ++l) {
        Rational b4(4 * balanced_expand(l, d).nonzero_count);
        Enclosure dev = Enclosure(Rational(n)) - Enclosure(Rational(l)) * A;
        // keep l unless |n - lA| >= 4 b_l for every A in the enclosure
        bool far = dev.lo >= b4 || dev.hi <= -b4;
        if (far) continue;
        if (first < 0) first = l;
        last = l;
    }
    return {first, last};
}

}  // namespace chacon
