#pragma once
#include "chacon/parameter_word.hpp"
#include "chacon/rational.hpp"
#include "chacon/return_dist.hpp"

#include <cstdint>
#include <vector>

namespace chacon {

// Constants of the two exceptional sets for a given d.
struct ExceptionalConfig {
    int d = 7;
    Rational C0;         // largest multiple of 1/200 with (1+C0)(d-1)^C0 / C0^C0 < 3/2
    double c0_value = 0;  // (1+C0)(d-1)^C0 / C0^C0 at the chosen C0
    int k1 = 0;          // smallest integer with C0 > 2^{1-k1}
    Rational c;          // 2/(1-1/d)
    bool ell0_top_at_m = false;  // alternative digit placement for l_0

    static ExceptionalConfig for_d(int d);
    // Same constants with C0 forced (sensitivity runs; the inequality may fail).
    static ExceptionalConfig with_c0(int d, const Rational& c0);
    int p(int m) const;  // floor(log_d(c m)) + 1
    int q(int m) const;  // 2 floor((1+log_d 2)/log 2 * log_d m) + 1
};

// (1+C0)(d-1)^C0 / C0^C0
double c0_criterion(int d, double c0);

// I_n^alpha with its radius scaled by `scale` (scale 1 gives I_n itself).
Localization scaled_localization(std::int64_t n, int k, const ParameterWord& w, const Rational& scale);

struct Membership {
    bool member = false;
    std::int64_t witness = -1;  // an l proving membership
};

// Some l in I_n^alpha with d^N <= l < d^{N+1} and b_l <= C0 N.
Membership in_first_exceptional(const ParameterWord& w, int k, std::int64_t n, const ExceptionalConfig& cfg,
                                const Rational& radius_scale = Rational(1));

// Balanced digits of l_0 for m (index 0 = a_0).
std::vector<int> ell0_digits(const ExceptionalConfig& cfg, int m);
std::int64_t ell0(const ExceptionalConfig& cfg, int m);
// l in the block progression {l_0 + r d^q} + [0, d^p].
bool in_block_set(std::int64_t ell, const ExceptionalConfig& cfg, int m);
// Defined once m - q - 1 >= 0.
bool second_set_defined(const ExceptionalConfig& cfg, int m);

// Some l in I_n^alpha lies in the block progression.
Membership in_second_exceptional(const ParameterWord& w, int k, std::int64_t n, const ExceptionalConfig& cfg);

int gamma_count(const ParameterWord& w, int m, int k1);
bool in_Mm(const ParameterWord& w, int m, int k1);
// H(M_m) exactly, by enumerating the 2^{m+k1-1} digit patterns it reads.
Rational Mm_measure_exact(int m, int k1);

// (c+2) m (3/4)^m / d^k
double first_set_bound(const ExceptionalConfig& cfg, int m, int k);

struct ExceptionalRow {
    std::int64_t n = 0;
    int m = 0;
    double H_W = 0, H_W_se = 0;
    bool second_defined = false;
    double H_Wcheck = 0, H_Wcheck_se = 0;
    double H_Mm = 0, H_Mm_se = 0;
    double H_Mm_exact = 0;
    double bound_W = 0;
    std::size_t samples = 0;
    std::int64_t first_witness = -1;  // from the first member fiber, if any
};

std::vector<ExceptionalRow> measure_estimates(int k, const std::vector<std::int64_t>& n_grid, std::size_t samples,
                                              std::uint64_t seed, const ExceptionalConfig& cfg);

// Count of block points l/n inside phi(K_m) + [-C3 m/n, C3 m/n], against
// the bound 2^{-q} n^{log 2/log d}. Floating point; a diagnostic only.
struct CantorCount {
    std::int64_t count = 0;
    double bound = 0;
};
CantorCount cantor_block_count(std::int64_t n, int k, const ExceptionalConfig& cfg);

}  // namespace chacon
