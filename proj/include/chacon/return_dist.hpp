#pragma once

#include "chacon/balanced.hpp"
#include "chacon/parameter_word.hpp"
#include "chacon/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chacon {

// Law of t'_{l,h} under Lebesgue measure on [0,1): sparse map n -> P(t'=n).
// Mass that could not be resolved (infinite random tails, undecided
// cylinders) is reported separately and never dropped.
struct ReturnDistribution {
    std::map<std::int64_t, Rational> support;
    Rational truncation_mass;
    std::int64_t ell = 0;
    int k = 0;
    std::int64_t h = 1;
    std::string alpha;
    std::int64_t shift_level = 0;

    Rational prob(std::int64_t n) const;
    Rational total() const;  // sum of probabilities (without truncation mass)
    Rational mean() const;   // of the resolved part
    Rational variance() const;
    std::int64_t min_value() const;
    std::int64_t max_value() const;
};

// Law of eps_k^alpha over {0,1,2}.
ReturnDistribution epsilon_distribution(const ParameterWord& w, int k, int depth = 64);

// Memoized recursion over (l, shift level). One engine per (alpha, k);
// not thread-safe, give each worker its own.
class DistributionEngine {
public:
    DistributionEngine(ParameterWord w, int k, int eps_depth = 64, size_t support_cap = 1u << 20);

    const ParameterWord& word() const { return w_; }
    int k() const { return k_; }
    std::int64_t h() const { return h_; }
    const ReturnDistribution& get(std::int64_t ell) { return node(ell, 0); }
    size_t memo_size() const { return memo_.size(); }

private:
    const ReturnDistribution& node(std::int64_t ell, std::int64_t s);
    const ReturnDistribution& eps_at(std::int64_t s);

    ParameterWord w_;
    int k_;
    std::int64_t h_;
    int eps_depth_;
    size_t support_cap_;
    std::map<std::pair<std::int64_t, std::int64_t>, ReturnDistribution> memo_;
    std::map<std::int64_t, ReturnDistribution> eps_;
};

ReturnDistribution distribution(std::int64_t ell, int k, const ParameterWord& w, int eps_depth = 64);

// Oracle: walk digit cylinders of x, splitting until t'_l is constant on the
// cylinder; the value there is the direct sum of first returns. Cylinders
// still undecided at `depth` go to truncation_mass. depth <= 0 picks
// max(12, ceil(log_d l) + 8).
ReturnDistribution brute_force_distribution(std::int64_t ell, int k, const ParameterWord& w, int depth = 0);

struct Moments {
    Rational mean;
    Rational variance;
};
Moments moments(std::int64_t ell, int k, const ParameterWord& w);  // periodic tails only
Rational kac_mean(std::int64_t ell, int k, const ParameterWord& w);   // l d^k (alpha+1)

// (1 - 2|alpha|/sqrt((d-1)(d-2))) (d-2)/(d-1)^2 b_l, compared exactly.
bool variance_lower_bound_holds(const Rational& variance, int nonzero_count, int max_digit, int d);
double variance_lower_bound(int nonzero_count, int max_digit, int d);

// Value of the summand X_j when the digits of sigma^j x known so far decide
// it, else nullopt.
std::optional<int> summand_from_prefix(const BalancedIndex& ell, int j, const ParameterWord& w, int k,
                                       const std::vector<int>& prefix);

// Cov(X_i, X_j) by joint enumeration of the digit cylinders the two
// summands read; undecided mass widens the enclosure.
Enclosure pairwise_covariance(int i, int j, std::int64_t ell, int k, const ParameterWord& w, int depth = 10);
// Exact V(X_i): X_i has the law of t'_{|a_i|} - |a_i| h for the shifted word.
Rational summand_variance(std::int64_t ell, int i, int k, const ParameterWord& w);
Rational covariance_bound(int i, int j, int max_digit, int d);

// I_n = n/(d^k(alpha+1)) +- m(c+2)/(d^k(alpha+1)), c = 2/(1-1/d), m = floor(log_d n).
struct Localization {
    std::int64_t n = 0;
    int m = 0;
    Enclosure center;
    Enclosure radius;

    // conservative: [center.lo - radius.hi, center.hi + radius.hi]
    Rational lo() const { return center.lo - radius.hi; }
    Rational hi() const { return center.hi + radius.hi; }
    bool contains(std::int64_t ell) const;
    std::int64_t ell_min() const;  // smallest integer >= max(lo, 0)
    std::int64_t ell_max() const;
};
Localization localization(std::int64_t n, int k, const ParameterWord& w, int depth = 64);

// Provable l-range for d'_l(n) > 0: each nonzero balanced digit moves t'
// away from its mean by less than 4, so |n - l d^k(1+alpha)| < 4 b_l.
std::pair<std::int64_t, std::int64_t> support_window(std::int64_t n, int k, const ParameterWord& w, int depth = 64);

}  // namespace chacon
