// Batch frontend over the spherint core library: transforms, limits, rate
// functions, Monte-Carlo estimators and the free-convolution experiments,
// emitted as CSV or JSON tables.  Output is buffered and printed whole, so a
// failing computation never leaves a partial table behind.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spherint/asymptote.hpp"
#include "spherint/errors.hpp"
#include "spherint/measure.hpp"
#include "spherint/measure_io.hpp"
#include "spherint/montecarlo.hpp"
#include "spherint/numerics.hpp"
#include "spherint/ratefn.hpp"
#include "spherint/rng.hpp"
#include "spherint/tolerance.hpp"
#include "spherint/transform.hpp"

namespace {

using spherint::AtomicMeasure;
using spherint::ToleranceConfig;
using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// a table cell: a finite number or a marker string ("DOMAIN", "DIRAC", "inf")
struct Cell {
    bool is_number = false;
    double number = 0.0;
    std::string marker;

    static Cell num(double x) {
        if (std::isinf(x)) return mark(x > 0 ? "inf" : "-inf");
        Cell c;
        c.is_number = true;
        c.number = x;
        return c;
    }
    static Cell mark(std::string m) {
        Cell c;
        c.marker = std::move(m);
        return c;
    }
    std::string csv() const { return is_number ? fmt17(number) : marker; }
    ordered_json json() const {
        return is_number ? ordered_json(number) : ordered_json(marker);
    }
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    std::string csv() const {
        std::string out;
        for (size_t i = 0; i < header.size(); ++i) {
            if (i) out += ',';
            out += header[i];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += row[i].csv();
            }
            out += '\n';
        }
        return out;
    }
    ordered_json json() const {
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json obj = ordered_json::object();
            for (size_t i = 0; i < row.size(); ++i) obj[header[i]] = row[i].json();
            arr.push_back(obj);
        }
        return arr;
    }
};

struct Options {
    std::vector<std::string> measures;
    std::string theta_grid;
    std::string theta_list;
    std::string alpha_grid;
    int beta = 1;
    int n = 200;
    long long samples = 10000;
    std::uint64_t seed = 12345;
    bool seed_given = false;
    std::string method = "direct";
    bool prefactor = false;
    int reps = 20;
    int chunks = 1;
    std::string format = "csv";
    std::vector<std::string> tol_overrides;
};

std::vector<double> parse_grid_string(const std::string& s) {
    // a:b:n inclusive linear grid
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw CLI::ValidationError("--theta-grid", "expected a:b:n");
    char* end = nullptr;
    const std::string sa = s.substr(0, c1), sb = s.substr(c1 + 1, c2 - c1 - 1),
                      sn = s.substr(c2 + 1);
    const double a = std::strtod(sa.c_str(), &end);
    if (end == sa.c_str() || *end) throw CLI::ValidationError("--theta-grid", "bad start value");
    const double b = std::strtod(sb.c_str(), &end);
    if (end == sb.c_str() || *end) throw CLI::ValidationError("--theta-grid", "bad stop value");
    const long n = std::strtol(sn.c_str(), &end, 10);
    if (end == sn.c_str() || *end || n < 1)
        throw CLI::ValidationError("--theta-grid", "bad point count");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    if (n == 1) {
        out.push_back(a);
        return out;
    }
    for (long i = 0; i < n; ++i)
        out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

std::vector<double> parse_value_list(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        const size_t next = s.find(',', pos);
        const std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end) throw CLI::ValidationError("--theta", "bad value: " + tok);
        out.push_back(v);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.empty()) throw CLI::ValidationError("--theta", "empty list");
    return out;
}

std::vector<double> resolve_thetas(const Options& o, bool required) {
    if (!o.theta_grid.empty() && !o.theta_list.empty())
        throw CLI::ValidationError("--theta", "give either --theta-grid or --theta, not both");
    if (!o.theta_grid.empty()) return parse_grid_string(o.theta_grid);
    if (!o.theta_list.empty()) return parse_value_list(o.theta_list);
    if (required) throw CLI::ValidationError("--theta", "a theta grid or list is required");
    return {};
}

ToleranceConfig resolve_tolerances(const Options& o) {
    ToleranceConfig tol = spherint::default_tolerances();
    for (const std::string& kv : o.tol_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--tol", "expected KEY=VAL, got " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        char* end = nullptr;
        if (key == "root_abs_tol" || key == "quad_abs_tol" || key == "jacobi_off_tol") {
            const double v = std::strtod(val.c_str(), &end);
            if (end == val.c_str() || *end || !(v > 0))
                throw CLI::ValidationError("--tol", "bad value for " + key);
            if (key == "root_abs_tol") tol.root_abs_tol = v;
            else if (key == "quad_abs_tol") tol.quad_abs_tol = v;
            else tol.jacobi_off_tol = v;
        } else if (key == "newton_max_iter" || key == "path_segments") {
            const long v = std::strtol(val.c_str(), &end, 10);
            if (end == val.c_str() || *end || v < 1)
                throw CLI::ValidationError("--tol", "bad value for " + key);
            if (key == "newton_max_iter") tol.newton_max_iter = static_cast<int>(v);
            else tol.path_segments = static_cast<int>(v);
        } else {
            throw CLI::ValidationError("--tol", "unknown key: " + key);
        }
    }
    return tol;
}

std::uint64_t resolve_seed(const Options& o) {
    if (o.seed_given) return o.seed;
    if (const char* env = std::getenv("SPHERINT_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && !*end) return v;
    }
    return o.seed;
}

AtomicMeasure load_single_measure(const Options& o) {
    if (o.measures.size() != 1)
        throw CLI::ValidationError("--measure", "exactly one measure file expected");
    return spherint::load_measure_file(o.measures[0]);
}

std::string render(const Options& o, const std::vector<std::pair<std::string, Table>>& blocks) {
    if (o.format == "json") {
        ordered_json doc = ordered_json::object();
        for (const auto& [name, tbl] : blocks) doc[name] = tbl.json();
        return doc.dump(2) + "\n";
    }
    std::string out;
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (i) out += '\n';
        out += blocks[i].second.csv();
    }
    return out;
}

// ---------------------------------------------------------------- transform

std::string cmd_transform(const Options& o) {
    const AtomicMeasure mu = load_single_measure(o);
    const ToleranceConfig tol = resolve_tolerances(o);
    const std::vector<double> gammas = resolve_thetas(o, true);

    Table t;
    t.header = {"gamma", "h", "k", "r", "q_roundtrip_resid"};
    for (double g : gammas) {
        std::vector<Cell> row;
        row.push_back(Cell::num(g));
        try {
            row.push_back(Cell::num(spherint::hilbert(mu, g)));
        } catch (const spherint::DomainError&) {
            row.push_back(Cell::mark("DOMAIN"));
        }
        try {
            row.push_back(Cell::num(spherint::k_transform(mu, g, tol)));
        } catch (const spherint::DomainError&) {
            row.push_back(Cell::mark("DOMAIN"));
        }
        std::optional<double> r_val;
        try {
            r_val = spherint::r_transform(mu, g, tol);
            row.push_back(Cell::num(*r_val));
        } catch (const spherint::DomainError&) {
            row.push_back(Cell::mark("DOMAIN"));
        }
        if (r_val) {
            try {
                const double q = spherint::q_transform(mu, *r_val, tol);
                row.push_back(Cell::num(std::fabs(q - g)));
            } catch (const spherint::DomainError&) {
                row.push_back(Cell::mark("DOMAIN"));
            }
        } else {
            row.push_back(Cell::mark("DOMAIN"));
        }
        t.rows.push_back(std::move(row));
    }
    return render(o, {{"rows", t}});
}

// -------------------------------------------------------------------- limit

std::string cmd_limit(const Options& o) {
    const AtomicMeasure mu = load_single_measure(o);
    const ToleranceConfig tol = resolve_tolerances(o);
    const std::vector<double> thetas = resolve_thetas(o, true);

    Table t;
    t.header = {"theta", "value", "v", "regime", "z", "prefactor"};
    for (double th : thetas) {
        const auto res = spherint::rank_one_limit(mu, th, o.beta, tol);
        std::vector<Cell> row;
        row.push_back(Cell::num(th));
        row.push_back(Cell::num(res.value));
        row.push_back(Cell::num(res.v_theta));
        row.push_back(Cell::mark(spherint::regime_name(res.regime)));
        if (mu.is_dirac()) {
            row.push_back(Cell::mark("DIRAC"));
            row.push_back(Cell::mark("DIRAC"));
        } else if (o.beta == 1 && th != 0.0 && res.regime == spherint::Regime::Interior) {
            try {
                const auto pf = spherint::clt_prefactor(mu, th, tol);
                row.push_back(Cell::num(pf.z_value));
                row.push_back(Cell::num(pf.prefactor));
            } catch (const spherint::SpherintError&) {
                row.push_back(Cell::mark("DOMAIN"));
                row.push_back(Cell::mark("DOMAIN"));
            }
        } else {
            row.push_back(Cell::mark("DOMAIN"));
            row.push_back(Cell::mark("DOMAIN"));
        }
        t.rows.push_back(std::move(row));
    }
    return render(o, {{"rows", t}});
}

// --------------------------------------------------------------------- rate

std::string cmd_rate(const Options& o) {
    const AtomicMeasure mu = load_single_measure(o);
    const ToleranceConfig tol = resolve_tolerances(o);

    std::vector<double> alphas;
    if (!o.alpha_grid.empty()) {
        alphas = parse_grid_string(o.alpha_grid);
    } else {
        const double lo = mu.lambda_min(), hi = mu.lambda_max();
        const int n = 200;
        for (int i = 0; i <= n; ++i)
            alphas.push_back(lo + (hi - lo) * static_cast<double>(i) / n);
        const double mean = mu.mean();
        auto it = std::lower_bound(alphas.begin(), alphas.end(), mean);
        if (it == alphas.end() || *it != mean) alphas.insert(it, mean);
    }

    Table ta;
    ta.header = {"alpha", "t_value", "piece"};
    for (double a : alphas) {
        const auto rp = spherint::t_rate(mu, a, tol);
        ta.rows.push_back({Cell::num(a), Cell::num(rp.t_value),
                           Cell::mark(spherint::rate_piece_name(rp.piece))});
    }

    std::vector<std::pair<std::string, Table>> blocks{{"alpha_table", ta}};

    const std::vector<double> thetas = resolve_thetas(o, false);
    if (!thetas.empty()) {
        Table tt;
        tt.header = {"theta", "legendre_value", "argmax", "g", "g1", "g2"};
        for (double th : thetas) {
            const auto leg = spherint::legendre_sup(mu, th, tol);
            const auto gp = spherint::g_pieces(mu, th, tol);
            tt.rows.push_back({Cell::num(th), Cell::num(leg.value), Cell::num(leg.argmax),
                               Cell::num(gp.g), Cell::num(gp.g1), Cell::num(gp.g2)});
        }
        blocks.emplace_back("theta_table", tt);
    }
    return render(o, blocks);
}

// ----------------------------------------------------------------------- mc

std::string cmd_mc(const Options& o) {
    const AtomicMeasure mu = load_single_measure(o);
    const ToleranceConfig tol = resolve_tolerances(o);
    const std::vector<double> thetas = resolve_thetas(o, true);
    if (o.n < 2) throw CLI::ValidationError("--n", "dimension must be at least 2");

    const spherint::Spectrum e = spherint::quantile_discretize(mu, o.n);
    spherint::McConfig cfg;
    cfg.n = o.n;
    cfg.samples = o.samples;
    cfg.seed = resolve_seed(o);
    cfg.beta = o.beta;
    cfg.method = o.method == "tilted" ? spherint::McMethod::Tilted : spherint::McMethod::Direct;
    cfg.chunks = o.chunks;

    Table t;
    t.header = {"theta", "estimate", "std_error", "oracle", "z"};
    for (double th : thetas) {
        std::vector<Cell> row;
        row.push_back(Cell::num(th));
        try {
            spherint::McEstimate est;
            double oracle;
            if (o.prefactor) {
                est = spherint::mc_prefactor_ratio(e, th, cfg, tol);
                if (mu.is_dirac()) {
                    oracle = 1.0; // the point-mass ratio is identically one
                } else {
                    oracle = spherint::clt_prefactor(mu, th, tol).prefactor;
                }
            } else {
                est = spherint::mc_log_integral(e, th, cfg, tol);
                oracle = th == 0.0 ? 0.0 : spherint::finite_n_leading_term(e, th, o.beta, tol);
                if (o.beta == 1 && th != 0.0 && !mu.is_dirac()) {
                    try {
                        oracle += std::log(spherint::clt_prefactor(mu, th, tol).prefactor) /
                                  static_cast<double>(o.n);
                    } catch (const spherint::SpherintError&) {
                        // outside the interior regime: no second-order correction
                    }
                }
            }
            double z;
            if (est.std_error == 0.0) {
                z = std::fabs(est.value - oracle) <= 1e-12 * std::max(1.0, std::fabs(oracle))
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
            } else {
                z = (est.value - oracle) / est.std_error;
            }
            row.push_back(Cell::num(est.value));
            row.push_back(Cell::num(est.std_error));
            row.push_back(Cell::num(oracle));
            row.push_back(Cell::num(z));
        } catch (const spherint::SpherintError&) {
            row.push_back(Cell::mark("DOMAIN"));
            row.push_back(Cell::mark("DOMAIN"));
            row.push_back(Cell::mark("DOMAIN"));
            row.push_back(Cell::mark("DOMAIN"));
        }
        t.rows.push_back(std::move(row));
    }
    return render(o, {{"rows", t}});
}

// ----------------------------------------------------------------- freeconv

std::string cmd_freeconv(const Options& o) {
    if (o.measures.size() != 2)
        throw CLI::ValidationError("--measure", "freeconv expects exactly two measure files");
    const AtomicMeasure mu_a = spherint::load_measure_file(o.measures[0]);
    const AtomicMeasure mu_b = spherint::load_measure_file(o.measures[1]);
    const ToleranceConfig tol = resolve_tolerances(o);
    const std::vector<double> thetas = resolve_thetas(o, true);
    const std::uint64_t seed = resolve_seed(o);

    const auto add = spherint::additivity_experiment(mu_a, mu_b, o.n, thetas, o.reps, seed, tol);
    const auto conc =
        spherint::concentration_experiment(mu_a, mu_b, o.n, thetas.front(), o.reps, seed, tol);

    Table ta;
    ta.header = {"theta", "sum_spectrum_limit", "separate_sum", "gap", "rep_stddev",
                 "r_sum_spectrum", "r_separate", "r_gap", "excluded"};
    for (const auto& r : add.rows) {
        ta.rows.push_back({Cell::num(r.theta), Cell::num(r.sum_spectrum_limit),
                           Cell::num(r.separate_sum), Cell::num(r.gap), Cell::num(r.rep_stddev),
                           Cell::num(r.r_sum_spectrum), Cell::num(r.r_separate),
                           Cell::num(r.r_gap), Cell::num(static_cast<double>(r.excluded))});
    }

    Table tc;
    tc.header = {"n", "reps", "theta", "mean_value", "variance", "variance_times_n", "excluded"};
    tc.rows.push_back({Cell::num(static_cast<double>(conc.n)),
                       Cell::num(static_cast<double>(conc.reps)), Cell::num(conc.theta),
                       Cell::num(conc.mean_value), Cell::num(conc.variance),
                       Cell::num(conc.variance_times_n),
                       Cell::num(static_cast<double>(conc.excluded))});

    return render(o, {{"additivity", ta}, {"concentration", tc}});
}

// ----------------------------------------------------------------- selftest

int cmd_selftest(const Options& o, std::string& out) {
    const ToleranceConfig tol = resolve_tolerances(o);
    using spherint::AtomicMeasure;

    struct Check {
        const char* name;
        bool (*fn)(const ToleranceConfig&);
    };
    const Check checks[] = {
        {"k-inverts-h",
         [](const ToleranceConfig& tc) {
             const auto mu = AtomicMeasure::bernoulli(-1.0, 1.0);
             for (double g : {0.3, 0.6, -0.4}) {
                 const double k = spherint::k_transform(mu, g, tc);
                 if (std::fabs(spherint::hilbert(mu, k) - g) > 1e-9 * std::max(1.0, std::fabs(g)))
                     return false;
             }
             return true;
         }},
        {"q-inverts-r",
         [](const ToleranceConfig& tc) {
             const auto mu = AtomicMeasure::bernoulli(-1.0, 1.0);
             for (double g : {0.2, 0.5}) {
                 const double a = spherint::r_transform(mu, g, tc);
                 if (std::fabs(spherint::q_transform(mu, a, tc) - g) >
                     1e-8 * std::max(1.0, std::fabs(g)))
                     return false;
             }
             return true;
         }},
        {"k-saturates-at-edge",
         [](const ToleranceConfig& tc) {
             const auto mu = AtomicMeasure::trimmed_bernoulli();
             const auto d = spherint::domain(mu);
             return std::fabs(spherint::k_transform(mu, d.h_max, tc) - mu.lambda_max()) <= 1e-9;
         }},
        {"legendre-matches-limit",
         [](const ToleranceConfig& tc) {
             const auto mu = AtomicMeasure::bernoulli(-1.0, 1.0);
             const double lim = spherint::rank_one_limit(mu, 0.25, 1, tc).value;
             return std::fabs(spherint::legendre_sup(mu, 0.25, tc).value - lim) <= 1e-6;
         }},
        {"point-mass-collapses",
         [](const ToleranceConfig& tc) {
             spherint::Spectrum e;
             e.eigenvalues.assign(50, 0.7);
             spherint::McConfig cfg;
             cfg.samples = 200;
             cfg.seed = 1;
             const auto est = spherint::mc_log_integral(e, 0.3, cfg, tc);
             return std::fabs(est.value - 0.21) <= 1e-13 && est.std_error <= 1e-14;
         }},
        {"complex-matches-real",
         [](const ToleranceConfig& tc) {
             const auto mu = AtomicMeasure::bernoulli(-1.0, 1.0);
             const auto c = spherint::complex_rank_one_limit(mu, {0.2, 0.0}, tc);
             const double r = spherint::rank_one_limit(mu, 0.2, 1, tc).value;
             return std::fabs(c.real() - r) <= 1e-10 && std::fabs(c.imag()) <= 1e-10;
         }},
    };

    int failures = 0;
    for (const auto& c : checks) {
        bool ok = false;
        try {
            ok = c.fn(tol);
        } catch (const std::exception&) {
            ok = false;
        }
        out += (ok ? "PASS " : "FAIL ") + std::string(c.name) + "\n";
        failures += ok ? 0 : 1;
    }
    const int total = static_cast<int>(sizeof(checks) / sizeof(checks[0]));
    out += "selftest: " + std::to_string(total - failures) + "/" + std::to_string(total) +
           " passed\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"asymptotics of rank-one and finite-rank spherical integrals"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub, bool with_measure) {
        if (with_measure)
            sub->add_option("--measure", o.measures, "measure JSON file (repeatable)");
        sub->add_option("--theta-grid", o.theta_grid, "inclusive grid a:b:n");
        sub->add_option("--theta", o.theta_list, "explicit values v[,v...]");
        sub->add_option("--beta", o.beta, "ensemble parameter")->check(CLI::IsMember({1, 2}));
        sub->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--tol", o.tol_overrides, "tolerance override KEY=VAL (repeatable)");
    };

    auto* c_transform = app.add_subcommand("transform", "H/K/R/Q transform table over a grid");
    add_common(c_transform, true);
    auto* c_limit = app.add_subcommand("limit", "rank-one limit, regime and prefactor table");
    add_common(c_limit, true);
    auto* c_rate = app.add_subcommand("rate", "rate function and Legendre tables");
    add_common(c_rate, true);
    c_rate->add_option("--alpha-grid", o.alpha_grid, "alpha grid a:b:n (default: support)");
    auto* c_mc = app.add_subcommand("mc", "Monte-Carlo estimate vs oracle table");
    add_common(c_mc, true);
    auto* c_freeconv = app.add_subcommand("freeconv", "additivity and concentration reports");
    add_common(c_freeconv, true);
    auto* c_selftest = app.add_subcommand("selftest", "run the invariant checks");
    add_common(c_selftest, false);

    for (CLI::App* sub : {c_mc, c_freeconv}) {
        auto* seed_opt = sub->add_option("--seed", o.seed, "RNG seed (env SPHERINT_SEED)");
        seed_opt->each([&](const std::string&) { o.seed_given = true; });
        sub->add_option("--n", o.n, "matrix dimension");
        sub->add_option("--samples", o.samples, "Monte-Carlo sample count");
        sub->add_option("--chunks", o.chunks, "independent RNG substreams");
    }
    c_mc->add_option("--method", o.method, "estimator method")
        ->check(CLI::IsMember({"direct", "tilted"}));
    c_mc->add_flag("--prefactor", o.prefactor, "estimate the second-order ratio instead");
    c_freeconv->add_option("--reps", o.reps, "independent Haar draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "usage error: " << e.what() << std::endl;
        return 2;
    }

    try {
        std::string out;
        int rc = 0;
        if (app.got_subcommand(c_transform)) out = cmd_transform(o);
        else if (app.got_subcommand(c_limit)) out = cmd_limit(o);
        else if (app.got_subcommand(c_rate)) out = cmd_rate(o);
        else if (app.got_subcommand(c_mc)) out = cmd_mc(o);
        else if (app.got_subcommand(c_freeconv)) out = cmd_freeconv(o);
        else rc = cmd_selftest(o, out);
        std::cout << out;
        return rc;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return 2;
    } catch (const spherint::DomainError& e) {
        std::cerr << "domain error: " << e.what() << std::endl;
        return 3;
    } catch (const spherint::SpherintError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
