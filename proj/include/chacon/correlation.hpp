#pragma once
#include "chacon/chacon_map.hpp"
#include "chacon/parameter_word.hpp"
#include "chacon/rational.hpp"
#include "chacon/return_dist.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chacon {

// lambda_alpha(A_k) = d^{-k}/(1+alpha).
Enclosure lambda_Ak(int k, const ParameterWord& w, int depth = 64);

// values[n] encloses lambda_alpha(A_k cap T^{-n} A_k) for n <= cutoff.
struct CorrelationSeries {
    int k = 0;
    std::string alpha;
    std::string method;
    std::vector<Enclosure> values;
    Enclosure lambda;
    std::int64_t cutoff = -1;  // last n computed
    bool complete = true;      // false when a budget stopped the run early
    Rational error_mass;       // interval defect or summed truncation mass
};

// Exact oracle: push A_k forward on the fixed-point grid and intersect with
// A_k at every step. Mass lost past band `band_cap` widens the enclosure.
CorrelationSeries correlation_by_intervals(int k, const ParameterWord& w, std::int64_t n_max, int band_cap = 38,
                                           std::size_t piece_budget = 4000000);

// lambda(A_k) * sum_l d'_l(n), summing every l whose provable support
// window reaches n <= n_max.
CorrelationSeries correlation_by_distributions(int k, const ParameterWord& w, std::int64_t n_max);

// Single n through an engine (fibers reuse their memo across n).
Enclosure correlation_at(std::int64_t n, DistributionEngine& engine);

// Generators of the pi-system: a level of the k-th tower, either inside
// [0,1) (tower level j, 1 <= j <= d^k) or inside a spacer added at stage
// n < k (copy c < alpha_n, sub-level r < d^{k-n-1}). u is the fiber
// cylinder: alpha must start with u, and |u| >= k.
struct CylinderSet {
    enum class Kind { TowerLevel, SpacerLevel };
    Kind kind = Kind::TowerLevel;
    std::vector<int> u;
    int k = 0;
    Rational lo, hi;

    static CylinderSet tower_level(const std::vector<int>& u, int k, std::int64_t j, int d);
    static CylinderSet spacer_level(const std::vector<int>& u, int k, int stage, int copy, std::int64_t r, int d);
    bool fiber_contains(const ParameterWord& w) const;
    std::string str() const;
};

// s with T^s(A_k) = A, found by following the orbit of 0 (the left ends of
// the tower levels); s < h_k.
std::int64_t generator_level(const CylinderSet& a, ChaconMap& T);

// Cov(1_A, 1_A o T^n) = lambda(A cap T^{-n} A) - lambda(A)^2, computed on
// A_k through the translation A = T^s(A_k).
Enclosure conditional_autocovariance(const CylinderSet& a, const ParameterWord& w, std::int64_t n);

// Same quantity by pushing A itself forward (independent check).
Enclosure autocovariance_by_intervals(const CylinderSet& a, const ParameterWord& w, std::int64_t n);

struct ShearOptions {
    int k = 0;
    int d = 7;
    std::vector<std::int64_t> n_grid;
    std::size_t samples = 200;
    std::uint64_t seed = 42;
    int spike_first = 2;  // rigidity times h_q for q in [spike_first, spike_last]
    int spike_last = 6;
    // bin_points > 1 replaces each grid value g by the mean over bin_points
    // evenly spaced n in [g d^{-bin_halfwidth}, g d^{bin_halfwidth}].
    int bin_points = 1;
    double bin_halfwidth = 0.25;
};

// The n values averaged for grid point g.
std::vector<std::int64_t> bin_members(std::int64_t g, int d, int points, double halfwidth);

struct ShearRow {
    std::int64_t n = 0;
    double mean_abs_cov = 0;
    double std_err = 0;
    std::size_t samples = 0;
};

struct ShearResult {
    std::vector<ShearRow> rows;
    // per fiber: |cov| at each grid n, then at each rigidity time h_q
    std::vector<std::vector<double>> grid_traces;
    std::vector<std::vector<double>> spike_traces;
    std::vector<double> spike_ratio;  // max/median over the fiber's full trace
    double limit_mean = 0;            // sample mean of lambda_alpha(A_k)^2
    double max_enclosure_width = 0;
};

// Geometric grid {ceil(d^{j/2}) : j in [first, last]}.
std::vector<std::int64_t> geometric_grid(int d, int first, int last);

ShearResult shear_experiment(const ShearOptions& opt);

// Fiber i of a run with master seed `seed`.
ParameterWord sample_fiber(int d, std::uint64_t seed, std::size_t i);

}  // namespace chacon
