#include "chacon/parameter_word.hpp"

#include "chacon/errors.hpp"
#include "chacon/rng.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace chacon {

namespace {

void check_d(int d) {
    if (d < 3 || d % 2 == 0) throw ConfigError("d must be odd and >= 3, got " + std::to_string(d));
}

std::vector<int> parse_digits(const std::string& s) {
    std::vector<int> out;
    for (char c : s) {
        if (c != '1' && c != '2') throw ConfigError("spacer digits must be 1 or 2, got '" + s + "'");
        out.push_back(c - '0');
    }
    return out;
}

std::string digits_str(const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += static_cast<char>('0' + x);
    return s;
}

std::uint64_t parse_seed(const std::string& s) {
    try {
        size_t pos = 0;
        auto v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad random seed '" + s + "'");
    }
}

}  // namespace

ParameterWord::ParameterWord(int d, std::vector<int> base, std::vector<int> period)
    : d_(d), kind_(TailKind::Periodic), base_(std::move(base)), period_(std::move(period)) {
    check_d(d);
    if (period_.empty()) throw ConfigError("periodic tail must be non-empty");
    for (int x : base_) if (x != 1 && x != 2) throw ConfigError("spacer digit outside {1,2}");
    for (int x : period_) if (x != 1 && x != 2) throw ConfigError("spacer digit outside {1,2}");
}

ParameterWord::ParameterWord(int d, std::vector<int> base, std::uint64_t seed)
    : d_(d), kind_(TailKind::Random), base_(std::move(base)), seed_(seed) {
    check_d(d);
    for (int x : base_) if (x != 1 && x != 2) throw ConfigError("spacer digit outside {1,2}");
}

ParameterWord ParameterWord::periodic(int d, const std::string& period, const std::string& base) {
    return ParameterWord(d, parse_digits(base), parse_digits(period));
}

ParameterWord ParameterWord::random(int d, std::uint64_t seed, const std::string& base) {
    return ParameterWord(d, parse_digits(base), seed);
}

ParameterWord ParameterWord::parse(const std::string& spec, int default_d) {
    int d = default_d;
    std::string base, tail;
    std::int64_t shift = 0;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            tail = item;
            continue;
        }
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "d") {
            try { d = std::stoi(val); } catch (const std::exception&) { throw ConfigError("bad d '" + val + "'"); }
        } else if (key == "base") {
            base = val;
        } else if (key == "tail") {
            tail = val;
        } else if (key == "shift") {
            shift = static_cast<std::int64_t>(parse_seed(val));
        } else {
            throw ConfigError("unknown parameter-word key '" + key + "'");
        }
    }
    if (tail.empty()) throw ConfigError("parameter word needs a tail: '" + spec + "'");
    auto colon = tail.find(':');
    std::string kind = colon == std::string::npos ? "periodic" : tail.substr(0, colon);
    std::string arg = colon == std::string::npos ? tail : tail.substr(colon + 1);
    ParameterWord w = kind == "periodic" ? periodic(d, arg, base)
                    : kind == "random"   ? random(d, parse_seed(arg), base)
                    : throw ConfigError("unknown tail kind '" + kind + "'");
    return w.shift(shift);
}

int ParameterWord::digit(std::int64_t j) const {
    if (j < 0) throw DomainError("negative spacer index");
    std::int64_t i = j + offset_;
    auto L = static_cast<std::int64_t>(base_.size());
    if (i < L) return base_[static_cast<size_t>(i)];
    if (kind_ == TailKind::Periodic) return period_[static_cast<size_t>((i - L) % period_length())];
    auto r = static_cast<std::uint64_t>(i - L);
    std::uint64_t word = counter_hash(seed_, kStreamDigits, r >> 6);
    return 1 + static_cast<int>((word >> (r & 63)) & 1U);
}

ParameterWord ParameterWord::shift(std::int64_t p) const {
    if (p < 0) throw DomainError("negative shift");
    ParameterWord w = *this;
    w.offset_ += p;
    return w;
}

std::int64_t ParameterWord::shift_key(std::int64_t s) const {
    std::int64_t i = offset_ + s;
    auto L = static_cast<std::int64_t>(base_.size());
    if (kind_ == TailKind::Periodic && i >= L) return L + (i - L) % period_length();
    return i;
}

std::int64_t ParameterWord::base_length() const {
    return std::max<std::int64_t>(0, static_cast<std::int64_t>(base_.size()) - offset_);
}

int ParameterWord::max_digit() const {
    if (kind_ == TailKind::Random) return 2;
    int m = *std::max_element(period_.begin(), period_.end());
    for (std::int64_t j = 0; j < base_length(); ++j) m = std::max(m, digit(j));
    return m;
}

std::string ParameterWord::str() const {
    std::string s = "d=" + std::to_string(d_);
    if (!base_.empty()) s += ";base=" + digits_str(base_);
    if (kind_ == TailKind::Periodic) s += ";tail=periodic:" + digits_str(period_);
    else s += ";tail=random:" + std::to_string(seed_);
    if (offset_ != 0) s += ";shift=" + std::to_string(offset_);
    return s;
}

Enclosure digit_series(const ParameterWord& w, const std::function<Rational(int)>& f, int depth) {
    const int d = w.d();
    Rational sum(0), scale(1, d);
    if (w.is_periodic()) {
        std::int64_t Lb = w.base_length(), p = w.period_length();
        for (std::int64_t j = 0; j < Lb; ++j, scale /= Rational(d)) sum += f(w.digit(j)) * scale;
        Rational block(0), s2(1, d);
        for (std::int64_t i = 0; i < p; ++i, s2 /= Rational(d)) block += f(w.digit(Lb + i)) * s2;
        Rational geo = 1 - inv_pow(d, static_cast<int>(p));
        sum += scale * Rational(d) * block / geo;
        return Enclosure(sum);
    }
    for (int j = 0; j < depth; ++j, scale /= Rational(d)) sum += f(w.digit(j)) * scale;
    // tail: sum_{j>=depth} f d^{-(j+1)} in [f_min, f_max] * d^{-depth}/(d-1)
    Rational t = inv_pow(d, depth) / Rational(d - 1);
    Rational f1 = f(1), f2 = f(2);
    return {sum + std::min(f1, f2) * t, sum + std::max(f1, f2) * t};
}

Enclosure alpha_value(const ParameterWord& w, int depth) {
    return digit_series(w, [](int v) { return Rational(v); }, depth);
}

Rational alpha_partial(const ParameterWord& w, std::int64_t n) {
    Rational s(0), scale(1, w.d());
    for (std::int64_t j = 0; j <= n; ++j, scale /= Rational(w.d())) s += Rational(w.digit(j)) * scale;
    return s;
}

Enclosure beta_moment(const ParameterWord& w, int k, int kappa, int depth) {
    if (k < 0 || kappa < 1) throw DomainError("beta_moment needs k >= 0 and kappa >= 1");
    return digit_series(w.shift(k), [kappa](int v) { return pow_int(Rational(v), kappa); }, depth);
}

BigInt tower_height(const ParameterWord& w, int k) {
    if (k < 0) throw DomainError("negative tower index");
    BigInt h = 1;
    for (int i = 0; i < k; ++i) h = h * w.d() + w.digit(i);
    return h;
}

std::int64_t tower_height_i64(const ParameterWord& w, int k) {
    BigInt h = tower_height(w, k);
    if (!h.fits_slong_p()) throw BudgetExceeded("tower height h_" + std::to_string(k) + " exceeds 64 bits");
    return h.get_si();
}

}  // namespace chacon
