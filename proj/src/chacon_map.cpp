#include "chacon/chacon_map.hpp"

#include "chacon/errors.hpp"

#include <algorithm>
#include <cmath>

namespace chacon {

namespace {
// Beyond this depth a point is considered to sit at the end of the domain.
constexpr int kMaxBand = 100000;
}  // namespace

ChaconMap::ChaconMap(ParameterWord w, int alpha_depth) : w_(std::move(w)), alpha_(alpha_value(w_, alpha_depth)) {
    partial_.push_back(Rational(0));
    dpow_.push_back(Rational(1));
}

const Rational& ChaconMap::dinv(int n) {
    while (static_cast<int>(dpow_.size()) <= n) dpow_.push_back(dpow_.back() / Rational(d()));
    return dpow_[static_cast<size_t>(n)];
}

const Rational& ChaconMap::partial(int n) {
    if (n < -1) throw DomainError("alpha partial sum index < -1");
    while (static_cast<int>(partial_.size()) <= n + 1) {
        int j = static_cast<int>(partial_.size()) - 1;
        Rational next = partial_.back() + Rational(w_.digit(j)) * dinv(j + 1);
        partial_.push_back(next);
    }
    return partial_[static_cast<size_t>(n + 1)];
}

Band ChaconMap::band(int n) {
    Band b;
    b.n = n;
    b.left_lo = 1 - dinv(n);
    b.left_hi = 1 - dinv(n + 1);
    b.spacer_lo = 1 + partial(n - 1);
    b.spacer_hi = 1 + partial(n);
    return b;
}

const std::vector<Piece>& ChaconMap::pieces(int n) {
    while (static_cast<int>(pieces_.size()) <= n) {
        int m = static_cast<int>(pieces_.size());
        Rational u = dinv(m + 1), v = dinv(m);
        Rational a = partial(m - 1), b = partial(m);
        std::vector<Piece> p;
        p.push_back({1 - v, 1 - 2 * u, u - (1 - v)});
        p.push_back({1 - 2 * u, 1 - u, 2 * u + a});
        if (w_.digit(m) == 2) p.push_back({1 + a, 1 + a + u, u});
        p.push_back({1 + b - u, 1 + b, Rational(d() - 1) * u - (1 + b - u)});
        pieces_.push_back(std::move(p));
    }
    return pieces_[static_cast<size_t>(n)];
}

void ChaconMap::check_domain(const Rational& x) const {
    if (x.sign() < 0) throw DomainError("point " + x.str() + " is below 0");
    if (x >= 1 + alpha_.hi) throw DomainError("point " + x.str() + " is beyond 1+alpha");
}

int ChaconMap::band_index(const Rational& x) {
    check_domain(x);
    if (x < Rational(1)) {
        int n = 0;
        while (x >= 1 - dinv(n + 1)) ++n;
        return n;
    }
    for (int n = 0; n < kMaxBand; ++n)
        if (x < 1 + partial(n)) return n;
    throw DomainError("point " + x.str() + " is not below 1+alpha");
}

Rational ChaconMap::apply(const Rational& x) {
    int n = band_index(x);
    for (const Piece& p : pieces(n))
        if (p.lo <= x && x < p.hi) return x + p.shift;
    throw std::logic_error("no case of T matched x=" + x.str() + " (partition bug)");
}

std::vector<Rational> ChaconMap::orbit(const Rational& x, std::int64_t steps) {
    if (steps < 0) throw DomainError("negative step count");
    std::vector<Rational> out{x};
    out.reserve(static_cast<size_t>(steps) + 1);
    for (std::int64_t i = 0; i < steps; ++i) out.push_back(apply(out.back()));
    return out;
}

int band_index(const Rational& x, const ParameterWord& w) { return ChaconMap(w).band_index(x); }
Rational apply_T(const Rational& x, const ParameterWord& w) { return ChaconMap(w).apply(x); }
std::vector<Rational> orbit(const Rational& x, const ParameterWord& w, std::int64_t steps) {
    return ChaconMap(w).orbit(x, steps);
}

IntervalSet::IntervalSet(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (auto& iv : v) {
        if (!(iv.lo < iv.hi)) continue;
        if (!iv_.empty() && iv.lo <= iv_.back().hi) {
            if (iv.lo < iv_.back().hi) throw std::logic_error("overlapping intervals in IntervalSet");
            iv_.back().hi = std::move(iv.hi);
        } else {
            iv_.push_back(std::move(iv));
        }
    }
}

IntervalSet IntervalSet::single(const Rational& lo, const Rational& hi) { return IntervalSet({{lo, hi}}); }

Rational IntervalSet::measure() const {
    Rational m(0);
    for (const auto& iv : iv_) m += iv.hi - iv.lo;
    return m;
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    size_t i = 0, j = 0;
    while (i < iv_.size() && j < o.iv_.size()) {
        const Rational& lo = std::max(iv_[i].lo, o.iv_[j].lo);
        const Rational& hi = std::min(iv_[i].hi, o.iv_[j].hi);
        if (lo < hi) out.push_back({lo, hi});
        if (iv_[i].hi < o.iv_[j].hi) ++i;
        else ++j;
    }
    IntervalSet r;
    r.iv_ = std::move(out);
    return r;
}

Rational IntervalSet::intersect_measure(const Rational& lo, const Rational& hi) const {
    Rational m(0);
    for (const auto& iv : iv_) {
        if (iv.lo >= hi) break;
        const Rational& a = std::max(iv.lo, lo);
        const Rational& b = std::min(iv.hi, hi);
        if (a < b) m += b - a;
    }
    return m;
}

bool operator==(const IntervalSet& a, const IntervalSet& b) {
    if (a.iv_.size() != b.iv_.size()) return false;
    for (size_t i = 0; i < a.iv_.size(); ++i)
        if (a.iv_[i].lo != b.iv_[i].lo || a.iv_[i].hi != b.iv_[i].hi) return false;
    return true;
}

IntervalSet push_forward_step(const IntervalSet& s, ChaconMap& T, int band_cap, Rational& defect) {
    std::vector<IntervalSet::Interval> out;
    auto emit = [&](const Rational& lo, const Rational& hi, int n) {
        for (const Piece& p : T.pieces(n)) {
            const Rational& a = std::max(lo, p.lo);
            const Rational& b = std::min(hi, p.hi);
            if (a < b) out.push_back({a + p.shift, b + p.shift});
        }
    };
    const Rational one(1);
    for (const auto& iv : s.intervals()) {
        if (iv.lo < one) {
            Rational top = std::min(iv.hi, one);
            for (int n = T.band_index(iv.lo);; ++n) {
                Band b = T.band(n);
                if (b.left_lo >= top) break;
                if (n > band_cap) {
                    defect += top - std::max(iv.lo, b.left_lo);
                    break;
                }
                emit(std::max(iv.lo, b.left_lo), std::min(top, b.left_hi), n);
            }
        }
        if (iv.hi > one) {
            Rational bottom = std::max(iv.lo, one);
            for (int n = T.band_index(bottom);; ++n) {
                Band b = T.band(n);
                if (b.spacer_lo >= iv.hi) break;
                if (n > band_cap) {
                    defect += iv.hi - std::max(bottom, b.spacer_lo);
                    break;
                }
                emit(std::max(bottom, b.spacer_lo), std::min(iv.hi, b.spacer_hi), n);
            }
        }
    }
    return IntervalSet(std::move(out));
}

PushForwardResult push_forward(const IntervalSet& s, ChaconMap& T, std::int64_t steps, int band_cap,
                               size_t piece_budget) {
    if (steps < 0) throw DomainError("negative step count");
    PushForwardResult r{s, Rational(0), s.size()};
    for (std::int64_t i = 0; i < steps; ++i) {
        r.set = push_forward_step(r.set, T, band_cap, r.defect);
        r.max_pieces = std::max(r.max_pieces, r.set.size());
        if (r.set.size() > piece_budget)
            throw BudgetExceeded("interval set reached " + std::to_string(r.set.size()) + " pieces at step " +
                                 std::to_string(i + 1));
    }
    return r;
}

}  // namespace chacon

namespace chacon {

namespace {

BigInt to_big(FixedPointPropagator::Int v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    BigInt hi(static_cast<unsigned long>(u >> 64)), lo(static_cast<unsigned long>(u & ~0ULL));
    BigInt r = (hi << 64) + lo;
    return neg ? BigInt(-r) : r;
}

}  // namespace

FixedPointPropagator::FixedPointPropagator(const ParameterWord& w, int band_cap)
    : d_(w.d()), cap_(band_cap), scale_(band_cap + 2) {
    // values stay below 2 * d^scale; keep clear of the 127-bit limit
    long double bits = scale_ * std::log2(static_cast<long double>(d_)) + 2;
    if (bits > 125) throw BudgetExceeded("band cap too deep for 128-bit fixed point");
    unit_ = 1;
    for (int i = 0; i < scale_; ++i) unit_ *= d_;
    std::vector<Int> dp(static_cast<size_t>(scale_) + 1);  // dp[j] = d^{scale-j}
    dp[static_cast<size_t>(scale_)] = 1;
    for (int j = scale_ - 1; j >= 0; --j) dp[static_cast<size_t>(j)] = dp[static_cast<size_t>(j) + 1] * d_;
    std::vector<Int> partial{0};  // partial[n+1] = alpha^{(n)}
    for (int j = 0; j <= cap_; ++j) partial.push_back(partial.back() + w.digit(j) * dp[static_cast<size_t>(j) + 1]);
    for (int n = 0; n <= cap_ + 1; ++n) {
        left_lo_.push_back(unit_ - dp[static_cast<size_t>(n)]);
        spacer_lo_.push_back(unit_ + partial[static_cast<size_t>(n)]);
    }
    for (int n = 0; n <= cap_; ++n) {
        Int u = dp[static_cast<size_t>(n) + 1], v = dp[static_cast<size_t>(n)];
        Int a = partial[static_cast<size_t>(n)], b = partial[static_cast<size_t>(n) + 1];
        std::vector<FPiece> p;
        p.push_back({unit_ - v, unit_ - 2 * u, u - (unit_ - v)});
        p.push_back({unit_ - 2 * u, unit_ - u, 2 * u + a});
        if (w.digit(n) == 2) p.push_back({unit_ + a, unit_ + a + u, u});
        p.push_back({unit_ + b - u, unit_ + b, (d_ - 1) * u - (unit_ + b - u)});
        pieces_.push_back(std::move(p));
    }
}

Rational FixedPointPropagator::to_rational(Int v) const { return Rational(to_big(v), to_big(unit_)); }

FixedPointPropagator::Int FixedPointPropagator::from_rational(const Rational& x) const {
    Rational scaled = x * Rational(to_big(unit_));
    if (!scaled.is_integer()) throw DomainError("point " + x.str() + " is not on the d-adic grid");
    BigInt v = scaled.num();
    bool neg = v < 0;
    if (neg) v = -v;
    BigInt hi = v >> 64, lo = v - (hi << 64);
    Int r = (static_cast<Int>(hi.get_ui()) << 64) | static_cast<Int>(lo.get_ui());
    return neg ? -r : r;
}

void FixedPointPropagator::reset(const IntervalSet& s) {
    iv_.clear();
    defect_ = 0;
    for (const auto& iv : s.intervals()) iv_.emplace_back(from_rational(iv.lo), from_rational(iv.hi));
}

void FixedPointPropagator::step() {
    scratch_.clear();
    auto emit = [&](Int lo, Int hi, int n) {
        for (const FPiece& p : pieces_[static_cast<size_t>(n)]) {
            Int a = std::max(lo, p.lo), b = std::min(hi, p.hi);
            if (a < b) scratch_.emplace_back(a + p.shift, b + p.shift);
        }
    };
    for (const auto& [lo, hi] : iv_) {
        if (lo < unit_) {
            Int top = std::min(hi, unit_);
            int n = static_cast<int>(std::upper_bound(left_lo_.begin(), left_lo_.end(), lo) - left_lo_.begin()) - 1;
            for (; n <= cap_ + 1; ++n) {
                Int blo = left_lo_[static_cast<size_t>(n)];
                if (blo >= top) break;
                if (n > cap_) {
                    defect_ += top - std::max(lo, blo);
                    break;
                }
                emit(std::max(lo, blo), std::min(top, left_lo_[static_cast<size_t>(n) + 1]), n);
            }
        }
        if (hi > unit_) {
            Int bottom = std::max(lo, unit_);
            int n = static_cast<int>(std::upper_bound(spacer_lo_.begin(), spacer_lo_.end(), bottom) -
                                     spacer_lo_.begin()) - 1;
            for (; n <= cap_ + 1; ++n) {
                Int blo = spacer_lo_[static_cast<size_t>(n)];
                if (blo >= hi) break;
                if (n > cap_) {
                    defect_ += hi - std::max(bottom, blo);
                    break;
                }
                emit(std::max(bottom, blo), std::min(hi, spacer_lo_[static_cast<size_t>(n) + 1]), n);
            }
        }
    }
    std::sort(scratch_.begin(), scratch_.end());
    iv_.clear();
    for (const auto& p : scratch_) {
        if (!iv_.empty() && p.first == iv_.back().second) iv_.back().second = p.second;
        else iv_.push_back(p);
    }
}

Rational FixedPointPropagator::measure() const {
    Int m = 0;
    for (const auto& [lo, hi] : iv_) m += hi - lo;
    return to_rational(m);
}

FixedPointPropagator::Int FixedPointPropagator::intersect_units(Int lo, Int hi) const {
    Int m = 0;
    auto it = std::lower_bound(iv_.begin(), iv_.end(), std::make_pair(lo, Int(0)),
                               [](const auto& a, const auto& b) { return a.second <= b.first; });
    for (; it != iv_.end() && it->first < hi; ++it) {
        Int a = std::max(it->first, lo), b = std::min(it->second, hi);
        if (a < b) m += b - a;
    }
    return m;
}

Rational FixedPointPropagator::intersect_measure(const Rational& lo, const Rational& hi) const {
    return to_rational(intersect_units(from_rational(lo), from_rational(hi)));
}

IntervalSet FixedPointPropagator::current() const {
    std::vector<IntervalSet::Interval> v;
    for (const auto& [lo, hi] : iv_) v.push_back({to_rational(lo), to_rational(hi)});
    return IntervalSet(std::move(v));
}

}  // namespace chacon
