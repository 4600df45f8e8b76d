#include "CLI11.hpp"
#include "json.hpp"

#include "chacon/chacon_map.hpp"
#include "chacon/correlation.hpp"
#include "chacon/errors.hpp"
#include "chacon/exceptional.hpp"
#include "chacon/return_dist.hpp"
#include "chacon/selftest.hpp"
#include "chacon/spectral.hpp"
#include "chacon/symbolic.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

using json = nlohmann::json;
using namespace chacon;

#ifndef CHACONLAB_VERSION
#define CHACONLAB_VERSION "unknown"
#endif

namespace {

const char* kVersion = "chacon-lab " CHACONLAB_VERSION;

struct RunConfig {
    std::string command;
    int d = 7;
    int k = 0;
    std::string alpha = "periodic:1";
    std::int64_t ell = 1;
    std::string x = "0";
    std::int64_t steps = 10;
    int k_max = 4;
    std::int64_t n_max = 100;
    std::string n_grid = "geometric:4:12";
    std::string m_grid = "4:7";
    std::size_t samples = 200;
    std::uint64_t seed = 42;
    int depth = 6;
    int bin_points = 1;
    std::string method = "both";
    std::string mode = "ly";
    double t = 1.0;
    double delta = 0.5;
    double a = 1.0;
    bool oracle = false;
    int decimals = 15;
    std::string format = "csv";
    std::string output;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, d, k, alpha, ell, x, steps, k_max, n_max, n_grid,
                                                m_grid, samples, seed, depth, bin_points, method, mode, t, delta, a,
                                                oracle, decimals, format, output)

// One output table; cells are JSON values so both renderings share them.
struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json summary = json::object();
};

std::string render_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

void write_report(const RunConfig& cfg, const Report& r) {
    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) throw ConfigError("cannot open output file " + cfg.output);
    }
    std::ostream& os = cfg.output.empty() ? std::cout : file;
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto& row : r.rows) {
            json o = json::object();
            for (size_t c = 0; c < row.size(); ++c) o[r.columns[c]] = row[c];
            rows.push_back(o);
        }
        json doc{{"version", kVersion}, {"config", cfg}, {"columns", r.columns}, {"rows", rows}, {"summary", r.summary}};
        os << doc.dump(2) << "\n";
        return;
    }
    os << "# " << kVersion << "\n# config " << json(cfg).dump() << "\n";
    if (!r.summary.empty()) os << "# summary " << r.summary.dump() << "\n";
    for (size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
    os << "\n";
    for (const auto& row : r.rows) {
        for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << render_cell(row[c]);
        os << "\n";
    }
}

ParameterWord word(const RunConfig& cfg) {
    try {
        return ParameterWord::parse(cfg.alpha, cfg.d);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("bad --alpha: ") + e.what());
    }
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw ConfigError("bad integer '" + item + "' in list " + s);
        }
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

// "geometric:a:b" (ceil d^{j/2}), "powers:a:b" (d^j), or a comma list.
std::vector<std::int64_t> parse_n_grid(const std::string& s, int d) {
    auto range = [&](const std::string& body) {
        auto colon = body.find(':');
        if (colon == std::string::npos) throw ConfigError("grid range needs a:b, got " + body);
        return std::pair<int, int>(std::stoi(body.substr(0, colon)), std::stoi(body.substr(colon + 1)));
    };
    if (s.rfind("geometric:", 0) == 0) {
        auto [a, b] = range(s.substr(10));
        return geometric_grid(d, a, b);
    }
    if (s.rfind("powers:", 0) == 0) {
        auto [a, b] = range(s.substr(7));
        std::vector<std::int64_t> out;
        for (int j = a; j <= b; ++j) out.push_back(ipow64(d, j));
        return out;
    }
    return parse_int_list(s);
}

std::vector<int> parse_m_grid(const std::string& s) {
    auto colon = s.find(':');
    std::vector<int> out;
    if (colon != std::string::npos) {
        for (int m = std::stoi(s.substr(0, colon)); m <= std::stoi(s.substr(colon + 1)); ++m) out.push_back(m);
    } else {
        for (auto v : parse_int_list(s)) out.push_back(static_cast<int>(v));
    }
    return out;
}

void push_rational(std::vector<json>& row, const Rational& r, int decimals) {
    row.push_back(r.num().get_str());
    row.push_back(r.den().get_str());
    row.push_back(r.decimal(decimals));
}

std::vector<std::string> rational_columns(const std::string& base) {
    return {base + "_num", base + "_den", base + "_decimal"};
}

void add_columns(Report& r, const std::vector<std::string>& cols) {
    r.columns.insert(r.columns.end(), cols.begin(), cols.end());
}

Report run_heights(const RunConfig& cfg) {
    auto w = word(cfg);
    Report r;
    r.columns = {"k", "h_k"};
    for (int k = 0; k <= cfg.k_max; ++k) r.rows.push_back({k, tower_height(w, k).get_str()});
    return r;
}

Report run_orbit(const RunConfig& cfg) {
    auto w = word(cfg);
    ChaconMap T(w);
    Report r;
    r.columns = {"step"};
    add_columns(r, rational_columns("x"));
    auto orb = T.orbit(Rational::parse(cfg.x), cfg.steps);
    for (size_t s = 0; s < orb.size(); ++s) {
        std::vector<json> row{static_cast<std::int64_t>(s)};
        push_rational(row, orb[s], cfg.decimals);
        r.rows.push_back(row);
    }
    return r;
}

// --x is a digit string x_1 x_2 ... (zeros afterwards) or a rational "p/q".
ShiftPoint shift_point(const std::string& s, int d) {
    if (s.find('/') != std::string::npos) return ShiftPoint(Rational::parse(s), d);
    std::vector<int> digits;
    for (char c : s) {
        if (c < '0' || c - '0' >= d) throw ConfigError("bad digit in --x: " + s);
        digits.push_back(c - '0');
    }
    return ShiftPoint::from_digits(digits, d);
}

Report run_return_time(const RunConfig& cfg) {
    auto w = word(cfg);
    ReturnCocycle rc(cfg.ell, cfg.k, tower_height_i64(w, cfg.k), w);
    auto x = shift_point(cfg.x, w.d());
    auto closed = return_time_closed_form(rc, x);
    auto direct = return_time_direct(rc, x);
    Report r;
    r.columns = {"ell", "k", "closed_form", "direct", "agree"};
    r.rows.push_back({cfg.ell, cfg.k, closed, direct, closed == direct});
    return r;
}

Report run_return_dist(const RunConfig& cfg) {
    auto w = word(cfg);
    auto dist = cfg.oracle ? brute_force_distribution(cfg.ell, cfg.k, w, 0) : distribution(cfg.ell, cfg.k, w);
    Report r;
    r.columns = {"n", "prob_num", "prob_den", "prob_decimal"};
    for (const auto& [n, p] : dist.support) {
        std::vector<json> row{n};
        push_rational(row, p, cfg.decimals);
        r.rows.push_back(row);
    }
    r.summary = {{"mean", dist.mean().str()},
                 {"variance", dist.variance().str()},
                 {"truncation_mass", dist.truncation_mass.str()},
                 {"method", cfg.oracle ? "cylinder-oracle" : "recursion"}};
    return r;
}

Report run_correlation(const RunConfig& cfg) {
    auto w = word(cfg);
    if (cfg.method != "intervals" && cfg.method != "distributions" && cfg.method != "both")
        throw ConfigError("--method must be intervals, distributions or both");
    std::optional<CorrelationSeries> iv, ds;
    if (cfg.method != "distributions") iv = correlation_by_intervals(cfg.k, w, cfg.n_max);
    if (cfg.method != "intervals") ds = correlation_by_distributions(cfg.k, w, cfg.n_max);
    const CorrelationSeries& main = ds ? *ds : *iv;
    Report r;
    r.columns = {"n"};
    add_columns(r, rational_columns("value"));
    r.columns.push_back("width_decimal");
    if (iv && ds) {
        add_columns(r, rational_columns("intervals"));
        r.columns.push_back("intervals_width_decimal");
        r.columns.push_back("agree");
    }
    for (size_t n = 0; n < main.values.size(); ++n) {
        std::vector<json> row{static_cast<std::int64_t>(n)};
        push_rational(row, main.values[n].lo, cfg.decimals);
        row.push_back(main.values[n].width().decimal(cfg.decimals));
        if (iv && ds) {
            const auto& a = iv->values[n];
            const auto& b = ds->values[n];
            push_rational(row, a.lo, cfg.decimals);
            row.push_back(a.width().decimal(cfg.decimals));
            row.push_back(!(a.hi < b.lo || b.hi < a.lo));
        }
        r.rows.push_back(row);
    }
    r.summary = {{"lambda_lo", main.lambda.lo.str()}, {"lambda_hi", main.lambda.hi.str()}};
    if (iv) r.summary["intervals_defect"] = iv->error_mass.str();
    if (ds) r.summary["distributions_truncation"] = ds->error_mass.str();
    return r;
}

Report run_shear(const RunConfig& cfg) {
    ShearOptions opt;
    opt.k = cfg.k;
    opt.d = cfg.d;
    opt.n_grid = parse_n_grid(cfg.n_grid, cfg.d);
    opt.samples = cfg.samples;
    opt.seed = cfg.seed;
    opt.bin_points = cfg.bin_points;
    auto res = shear_experiment(opt);
    Report r;
    r.columns = {"n", "mean_abs_cov", "std_err", "samples"};
    for (const auto& row : res.rows)
        r.rows.push_back({row.n, row.mean_abs_cov, row.std_err, static_cast<std::uint64_t>(row.samples)});
    double worst = 0;
    for (double v : res.spike_ratio) worst = std::max(worst, v);
    r.summary = {{"limit_mean", res.limit_mean},
                 {"max_enclosure_width", res.max_enclosure_width},
                 {"max_spike_ratio", worst}};
    return r;
}

Report run_exceptional(const RunConfig& cfg) {
    auto ec = ExceptionalConfig::for_d(cfg.d);
    auto rows = measure_estimates(cfg.k, parse_n_grid(cfg.n_grid, cfg.d), cfg.samples, cfg.seed, ec);
    Report r;
    r.columns = {"n", "m", "H_W_hat", "H_W_se", "H_Wcheck_hat", "H_Wcheck_se", "H_Mm_hat", "bound_W"};
    for (const auto& e : rows) {
        json wc = e.second_defined ? json(e.H_Wcheck) : json("undefined");
        json wcs = e.second_defined ? json(e.H_Wcheck_se) : json("undefined");
        r.rows.push_back({e.n, e.m, e.H_W, e.H_W_se, wc, wcs, e.H_Mm, e.bound_W});
    }
    r.summary = {{"C0", ec.C0.str()}, {"k1", ec.k1}};
    return r;
}

Report run_operator(const RunConfig& cfg) {
    auto w = word(cfg);
    auto p = SpectralParams::make(cfg.d, cfg.delta, cfg.a);
    Report r;
    if (cfg.mode == "ly") {
        auto tables = operator_tables(cfg.ell, cfg.k, w, cfg.depth, 1);
        r.columns = {"index", "t", "lhs", "rhs", "pass", "defect_mass"};
        for (std::size_t i = 0; i < cfg.samples; ++i) {
            auto g = random_function(cfg.d, cfg.depth, cfg.seed, i, i % 2);
            auto res = lasota_yorke_check(tables[0], cfg.t, g, p);
            r.rows.push_back({static_cast<std::uint64_t>(i), cfg.t, res.lhs, res.rhs, res.pass, tables[0].defect_mass});
        }
    } else if (cfg.mode == "contraction") {
        auto tr = contraction_check(cfg.ell, cfg.k, w, cfg.t, cfg.depth, p);
        r.columns = {"s", "norm", "sup_norm", "defect_mass"};
        for (size_t s = 0; s < tr.norms.size(); ++s)
            r.rows.push_back({static_cast<std::uint64_t>(s), tr.norms[s], tr.sup_norms[s], tr.defect_mass});
        r.summary = {{"rate", tr.rate}};
    } else if (cfg.mode == "chf") {
        auto c = characteristic_function(cfg.ell, cfg.k, w, cfg.t, cfg.depth);
        r.columns = {"t", "operator_re", "operator_im", "distribution_re", "distribution_im", "difference",
                     "defect_mass", "truncation_mass"};
        r.rows.push_back({c.t, c.by_operator.re, c.by_operator.im, c.by_distribution.re, c.by_distribution.im,
                          c.difference, c.defect_mass, c.truncation_mass});
        auto e = eigen_report(cfg.ell, cfg.k, w, cfg.depth);
        r.summary = {{"eps0", e.eps0},         {"d1", e.d1},       {"d2", e.d2},
                     {"d2_half", e.d2_half},   {"second_moment", e.second_moment},
                     {"remainder", e.remainder}, {"residual", e.residual}};
    } else if (cfg.mode == "llt") {
        auto rep = llt_report(cfg.ell, cfg.k, w);
        r.columns = {"n"};
        add_columns(r, rational_columns("exact"));
        add_columns(r, {"gaussian", "error", "defect_mass"});
        for (const auto& row : rep.rows) {
            std::vector<json> out{row.n};
            push_rational(out, row.exact, cfg.decimals);
            out.push_back(row.gaussian);
            out.push_back(row.error);
            out.push_back(rep.truncation_mass);
            r.rows.push_back(out);
        }
        r.summary = {{"m", rep.m},         {"sigma", rep.sigma},           {"sup_error", rep.sup_error},
                     {"m_sup_error", rep.m_sup_error}, {"gated", rep.gated}, {"gaussian_sum", rep.gaussian_sum}};
    } else if (cfg.mode == "mdp") {
        auto rows = moderate_deviation_check(parse_m_grid(cfg.m_grid), cfg.k, w);
        r.columns = {"m", "ell", "threshold"};
        add_columns(r, rational_columns("tail"));
        add_columns(r, {"c_plus", "c_minus", "bound", "pass", "defect_mass"});
        for (const auto& row : rows) {
            std::vector<json> out{row.m, row.ell, row.threshold};
            push_rational(out, row.tail, cfg.decimals);
            out.insert(out.end(), {row.c_plus, row.c_minus, row.bound, row.pass, 0.0});
            r.rows.push_back(out);
        }
    } else {
        throw ConfigError("--mode must be ly, contraction, chf, llt or mdp");
    }
    return r;
}

Report run_llt(const RunConfig& cfg) {
    auto w = word(cfg);
    Report r;
    r.columns = {"m", "ell", "nonzero", "sigma", "sup_error", "m_sup_error", "gaussian_sum", "gated"};
    for (int m : parse_m_grid(cfg.m_grid)) {
        auto rep = llt_report(all_ones_index(m + 1, cfg.d), cfg.k, w);
        r.rows.push_back({rep.m, rep.ell, rep.nonzero, rep.sigma, rep.sup_error, rep.m_sup_error, rep.gaussian_sum,
                          rep.gated});
    }
    return r;
}

// Statement of the construction -> where it is computed and checked.
Report run_statement_index(const RunConfig&) {
    Report r;
    r.columns = {"statement", "code"};
    const std::vector<std::pair<const char*, const char*>> rows = {
        {"spacer sequence and tower heights h_k", "parameter_word.tower_height"},
        {"the transformation T_alpha on bands Z_n", "chacon_map.apply_T"},
        {"tower of A_k: T^{h_k-1}x = x + 1 - d^{-k}", "chacon_map.ChaconMap::orbit"},
        {"induced map on A_k conjugate to the odometer", "symbolic.induced_map_on_base / ShiftPoint::odometer"},
        {"first return h_k + eps_k(u_k x)", "symbolic.symbolic_first_return"},
        {"l-th return as a sum of first returns", "symbolic.return_time_direct"},
        {"closed form of the l-th return via balanced digits", "symbolic.return_time_closed_form"},
        {"recursion for the law of t'_l", "return_dist.DistributionEngine"},
        {"Kac mean of t'_l", "return_dist.kac_mean"},
        {"covariance bound between summands", "return_dist.pairwise_covariance / covariance_bound"},
        {"variance lower bound in b_l", "return_dist.variance_lower_bound"},
        {"localization interval I_n", "return_dist.localization"},
        {"correlation as a sum over return laws", "correlation.correlation_by_distributions"},
        {"generators of the pi-system reduce to A_k", "correlation.conditional_autocovariance"},
        {"fiber-averaged decay of correlations", "correlation.shear_experiment"},
        {"first exceptional set W", "exceptional.in_first_exceptional"},
        {"second exceptional set and block progression", "exceptional.in_second_exceptional"},
        {"measure of M_m", "exceptional.Mm_measure_exact"},
        {"oscillation seminorm and Lasota-Yorke inequality", "spectral.lasota_yorke_check"},
        {"iterated Lasota-Yorke inequality", "spectral.lasota_yorke_composed"},
        {"contraction of the twisted operators", "spectral.contraction_check"},
        {"characteristic function through the operators", "spectral.characteristic_function"},
        {"leading eigenvalue expansion near z = 0", "spectral.eigen_report"},
        {"local limit theorem", "spectral.llt_report"},
        {"moderate deviation bound", "spectral.moderate_deviation_check"},
    };
    for (const auto& [s, c] : rows) r.rows.push_back({s, c});
    return r;
}

// Flags bound to shared storage, copied into the config only when given,
// so that values from --config survive unless overridden.
struct Overrides {
    std::vector<std::function<void(RunConfig&)>> apply;

    template <class T>
    void add(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
        auto slot = std::make_shared<T>();
        auto* opt = app->add_option(name, *slot, help);
        apply.push_back([opt, slot, field](RunConfig& c) {
            if (opt->count()) c.*field = *slot;
        });
    }
    void flag(CLI::App* app, const std::string& name, bool RunConfig::*field, const std::string& help) {
        auto* opt = app->add_flag(name, help);
        apply.push_back([opt, field](RunConfig& c) {
            if (opt->count()) c.*field = true;
        });
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized d-Chacon transformations: returns, correlations, exceptional sets, spectra"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::string config_path;
    Overrides ov;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON RunConfig file; flags override its values");
        ov.add(s, "--d", &RunConfig::d, "odd base d >= 3");
        ov.add(s, "--format", &RunConfig::format, "csv or json");
        ov.add(s, "--output,-o", &RunConfig::output, "output file (default stdout)");
        ov.add(s, "--decimals", &RunConfig::decimals, "digits of the decimal convenience column");
    };
    auto with_alpha = [&](CLI::App* s) { ov.add(s, "--alpha", &RunConfig::alpha, "spacer word, e.g. periodic:21"); };

    std::map<std::string, std::function<Report(const RunConfig&)>> runners;

    auto* heights = app.add_subcommand("heights", "tower heights h_k");
    common(heights), with_alpha(heights);
    ov.add(heights, "--k-max", &RunConfig::k_max, "largest k");
    runners["heights"] = run_heights;

    auto* orb = app.add_subcommand("orbit", "exact orbit of a rational point");
    common(orb), with_alpha(orb);
    ov.add(orb, "--x", &RunConfig::x, "starting point p/q in [0, 1+alpha)");
    ov.add(orb, "--steps", &RunConfig::steps, "number of steps");
    runners["orbit"] = run_orbit;

    auto* rt = app.add_subcommand("return-time", "closed-form and direct l-th return time");
    common(rt), with_alpha(rt);
    ov.add(rt, "--ell", &RunConfig::ell, "return index l");
    ov.add(rt, "--k", &RunConfig::k, "tower level k");
    ov.add(rt, "--x", &RunConfig::x, "digits x_1 x_2 ... or p/q");
    runners["return-time"] = run_return_time;

    auto* rd = app.add_subcommand("return-dist", "law of the l-th return time");
    common(rd), with_alpha(rd);
    ov.add(rd, "--ell", &RunConfig::ell, "return index l");
    ov.add(rd, "--k", &RunConfig::k, "tower level k");
    ov.flag(rd, "--oracle", &RunConfig::oracle, "use the cylinder enumeration instead of the recursion");
    runners["return-dist"] = run_return_dist;

    auto* cor = app.add_subcommand("correlation", "lambda(A_k cap T^-n A_k)");
    common(cor), with_alpha(cor);
    ov.add(cor, "--k", &RunConfig::k, "tower level k");
    ov.add(cor, "--n-max", &RunConfig::n_max, "largest n");
    ov.add(cor, "--method", &RunConfig::method, "intervals, distributions or both");
    runners["correlation"] = run_correlation;

    auto* sh = app.add_subcommand("shear", "fiber-averaged |Cov| over sampled spacer words");
    common(sh);
    ov.add(sh, "--k", &RunConfig::k, "tower level k");
    ov.add(sh, "--samples", &RunConfig::samples, "number of fibers");
    ov.add(sh, "--seed", &RunConfig::seed, "master seed");
    ov.add(sh, "--n-grid", &RunConfig::n_grid, "geometric:a:b, powers:a:b or a comma list");
    ov.add(sh, "--bin-points", &RunConfig::bin_points, "n values averaged per grid point");
    runners["shear"] = run_shear;

    auto* ex = app.add_subcommand("exceptional", "Monte-Carlo measure of the exceptional sets");
    common(ex);
    ov.add(ex, "--k", &RunConfig::k, "tower level k");
    ov.add(ex, "--samples", &RunConfig::samples, "number of fibers");
    ov.add(ex, "--seed", &RunConfig::seed, "master seed");
    ov.add(ex, "--n-grid", &RunConfig::n_grid, "geometric:a:b, powers:a:b or a comma list");
    runners["exceptional"] = run_exceptional;

    auto* op = app.add_subcommand("operator", "twisted transfer operators");
    common(op), with_alpha(op);
    ov.add(op, "--mode", &RunConfig::mode, "ly, contraction, chf, llt or mdp");
    ov.add(op, "--t", &RunConfig::t, "frequency t (z = i t)");
    ov.add(op, "--ell", &RunConfig::ell, "return index l");
    ov.add(op, "--k", &RunConfig::k, "tower level k");
    ov.add(op, "--depth", &RunConfig::depth, "cylinder depth of test functions");
    ov.add(op, "--samples", &RunConfig::samples, "test functions (ly)");
    ov.add(op, "--seed", &RunConfig::seed, "seed of test functions (ly)");
    ov.add(op, "--m-grid", &RunConfig::m_grid, "a:b or a comma list (mdp)");
    ov.add(op, "--delta", &RunConfig::delta, "seminorm weight delta");
    ov.add(op, "--a", &RunConfig::a, "norm constant a");
    runners["operator"] = run_operator;

    auto* llt = app.add_subcommand("llt", "local limit gap for l with m+1 unit digits");
    common(llt), with_alpha(llt);
    ov.add(llt, "--k", &RunConfig::k, "tower level k");
    ov.add(llt, "--m-grid", &RunConfig::m_grid, "a:b or a comma list");
    runners["llt"] = run_llt;

    auto* pm = app.add_subcommand("paper-map", "statement-to-code index");
    common(pm);
    runners["paper-map"] = run_statement_index;

    auto* st = app.add_subcommand("selftest", "run the invariant suite");
    common(st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config " + config_path);
            try {
                cfg = json::parse(in).get<RunConfig>();
            } catch (const json::exception& e) {
                throw ConfigError(std::string("bad config: ") + e.what());
            }
        }
        for (auto& f : ov.apply) f(cfg);
        cfg.command = sub->get_name();
        if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("--format must be csv or json");
        if (cfg.d < 3 || cfg.d % 2 == 0) throw ConfigError("--d must be odd and >= 3");
        if (cfg.k < 0) throw ConfigError("--k must be >= 0");

        if (cfg.command == "selftest") {
            auto results = run_selftest();
            Report r;
            r.columns = {"check", "pass", "detail"};
            bool ok = true;
            for (const auto& c : results) {
                r.rows.push_back({c.name, c.pass, c.detail});
                ok = ok && c.pass;
            }
            write_report(cfg, r);
            return ok ? 0 : 5;
        }
        write_report(cfg, runners.at(cfg.command)(cfg));
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: domain: " << e.what() << "\n";
        return 3;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: budget: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
