#pragma once

#include "chacon/rational.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace chacon {

enum class TailKind { Periodic, Random };

// A spacer sequence alpha in {1,2}^N: explicit prefix plus a tail policy.
// Random tails are generated in counter mode from the seed, so digit(j) is a
// pure function and the word can be shared freely between threads.
class ParameterWord {
public:
    ParameterWord(int d, std::vector<int> base, std::vector<int> period);
    ParameterWord(int d, std::vector<int> base, std::uint64_t seed);

    static ParameterWord periodic(int d, const std::string& period, const std::string& base = "");
    static ParameterWord random(int d, std::uint64_t seed, const std::string& base = "");
    // "d=7;base=121;tail=periodic:1", "tail=random:42", or the short forms
    // "periodic:21" / "random:42" (d then comes from default_d).
    static ParameterWord parse(const std::string& spec, int default_d = 7);

    int d() const { return d_; }
    bool theory_guaranteed() const { return d_ >= 7; }
    TailKind tail_kind() const { return kind_; }
    bool is_periodic() const { return kind_ == TailKind::Periodic; }
    std::uint64_t seed() const { return seed_; }
    std::int64_t offset() const { return offset_; }

    int digit(std::int64_t j) const;
    ParameterWord shift(std::int64_t p) const;

    // Canonical memo key for shift(s): two shifts with equal keys are the
    // same word.
    std::int64_t shift_key(std::int64_t s) const;
    // Length after which the word is purely periodic (relative to this shift).
    std::int64_t base_length() const;
    std::int64_t period_length() const { return static_cast<std::int64_t>(period_.size()); }

    int max_digit() const;  // sup norm of alpha; random tails report 2
    std::string str() const;

private:
    int d_;
    TailKind kind_;
    std::vector<int> base_;
    std::vector<int> period_;
    std::uint64_t seed_ = 0;
    std::int64_t offset_ = 0;
};

// sum_j f(digit j) d^{-(j+1)}; exact for periodic tails, otherwise the
// partial sum to `depth` digits plus certified tail bounds.
Enclosure digit_series(const ParameterWord& w, const std::function<Rational(int)>& f, int depth);

Enclosure alpha_value(const ParameterWord& w, int depth = 64);
// alpha^{(n)} = sum_{j<=n} alpha_j d^{-(j+1)}; alpha^{(-1)} = 0.
Rational alpha_partial(const ParameterWord& w, std::int64_t n);
Enclosure beta_moment(const ParameterWord& w, int k, int kappa, int depth = 64);

BigInt tower_height(const ParameterWord& w, int k);
std::int64_t tower_height_i64(const ParameterWord& w, int k);  // throws BudgetExceeded on overflow

}  // namespace chacon
