// Acceptance runner: the library's end-to-end guarantees, one line per check.
// Each criterion prints PASS/FAIL with its wall time against a fixed budget;
// the exit status is the number of failures, so the suite can gate a build.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "spherint/asymptote.hpp"
#include "spherint/measure.hpp"
#include "spherint/montecarlo.hpp"
#include "spherint/ratefn.hpp"
#include "spherint/rng.hpp"
#include "spherint/transform.hpp"

#include "test_helpers.hpp"

using namespace spherint;

namespace {

const ToleranceConfig tol = default_tolerances();

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

// ---- 1: point masses are reproduced exactly, including by sampling ---------

Outcome point_mass_exactness() {
    double max_err = 0.0;
    for (double e : {-1.3, 0.0, 0.7, 2.5}) {
        const auto d = AtomicMeasure::dirac(e);
        for (double th : {-2.0, -0.5, 0.0, 0.3, 1.7})
            for (int beta : {1, 2}) {
                const auto r = rank_one_limit(d, th, beta, tol);
                max_err = std::max(max_err, std::fabs(r.value - th * e));
                max_err = std::max(max_err, std::fabs(r.v_theta - e));
            }
    }
    McConfig cfg;
    cfg.samples = 64;
    cfg.seed = 2026;
    const auto spec = quantile_discretize(AtomicMeasure::dirac(0.7), 48);
    const auto est = mc_log_integral(spec, 0.3, cfg, tol);
    max_err = std::max(max_err, std::fabs(est.value - 0.3 * 0.7));
    const bool pass = max_err <= 1e-14 && est.std_error == 0.0;
    return {pass, strf("max_err=%.2e mc_se=%.1e", max_err, est.std_error)};
}

// ---- 2: quadrature representation agrees with the closed limit -------------

Outcome small_tilt_identity() {
    const std::vector<AtomicMeasure> ms = {
        AtomicMeasure::bernoulli(-1.0, 1.0),
        AtomicMeasure::bernoulli(-0.5, 1.5, 0.3),
        AtomicMeasure::uniform_grid(-1.0, 1.0, 50),
        AtomicMeasure::uniform_grid(0.0, 2.0, 80),
        AtomicMeasure::semicircle_grid(400),
    };
    const double ths[10] = {-0.45, -0.3, -0.18, -0.1, 0.05,
                            0.1,   0.18, 0.27,  0.38, 0.45};
    double max_err = 0.0;
    int pairs = 0;
    for (const auto& m : ms)
        for (int beta : {1, 2})
            for (double th : ths) {
                const double a = rank_one_limit(m, th, beta, tol).value;
                const double b = small_theta_integral(m, th, beta, tol);
                max_err = std::max(max_err, std::fabs(a - b));
                ++pairs;
            }
    return {pairs == 100 && max_err <= 1e-8,
            strf("pairs=%d max_err=%.2e", pairs, max_err)};
}

// ---- 3: semicircle law: R is the identity, the limit is quadratic ----------

Outcome semicircle_quadratic_law() {
    const auto s = AtomicMeasure::semicircle_grid(2000);
    double r_err = 0.0;
    for (int i = 0; i <= 18; ++i) {
        const double g = -0.9 + 0.1 * i;
        r_err = std::max(r_err, std::fabs(r_transform(s, g, tol) - g));
    }
    double v_err = 0.0;
    for (int i = 0; i <= 18; ++i) {
        const double th = -0.45 + 0.05 * i;
        v_err = std::max(v_err,
                         std::fabs(rank_one_limit(s, th, 1, tol).value - th * th));
    }
    return {r_err <= 5e-3 && v_err <= 2e-3,
            strf("r_err=%.2e value_err=%.2e", r_err, v_err)};
}

// ---- 4: Legendre duality and the closed-form envelope ----------------------

Outcome legendre_duality() {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    const double thc = 2.0 / 3.0; // transition tilt of this measure
    const std::vector<double> ths = {-1.5, -1.0, -0.8, -thc - 0.01, -thc,
                                     -0.5, -0.25, -0.1, 0.1,  0.25,
                                     0.5,  thc,   thc + 0.01, 0.8, 1.0, 1.5};
    double dual_err = 0.0, piece_err = 0.0;
    for (double th : ths) {
        const double lim = rank_one_limit(t, th, 1, tol).value;
        const auto leg = legendre_sup(t, th, tol);
        dual_err = std::max(dual_err, std::fabs(leg.value - lim));
        const auto p = g_pieces(t, th, tol);
        const double env = std::max(p.g, std::max(p.g1, p.g2));
        piece_err = std::max(piece_err, std::fabs(env - leg.value));
    }
    return {dual_err <= 1e-6 && piece_err <= 1e-6,
            strf("thetas=%zu dual_err=%.2e envelope_err=%.2e", ths.size(),
                 dual_err, piece_err)};
}

// ---- 5: the rate function commutes with recentering ------------------------

Outcome shift_identity() {
    CounterRng rng(8820, 5);
    int checked = 0, agreed = 0;
    while (checked < 50) {
        const auto m = testutil::random_measure(rng);
        const double span = m.lambda_max() - m.lambda_min();
        const double a =
            m.lambda_min() + span * (0.03 + 0.94 * rng.next_unit());
        ++checked;
        if (shift_identity_check(m, a, tol)) ++agreed;
    }
    return {agreed == 50, strf("agreed=%d/50", agreed)};
}

// ---- 6: sampled fluctuation constant converges to the predicted one --------

Outcome prefactor_convergence() {
    const auto mu = AtomicMeasure::bernoulli(-1.0, 1.0);
    const double theta = 0.25;
    const double oracle = clt_prefactor(mu, theta, tol).prefactor;
    const int ns[4] = {250, 500, 1000, 2000};
    double err[4], se[4];
    for (int i = 0; i < 4; ++i) {
        McConfig cfg;
        cfg.samples = 1000000;
        cfg.seed = 777;
        cfg.method = McMethod::Tilted;
        const auto est = mc_prefactor_ratio(quantile_discretize(mu, ns[i]),
                                            theta, cfg, tol);
        err[i] = std::fabs(est.value - oracle);
        se[i] = est.std_error;
    }
    bool monotone = true;
    for (int i = 0; i + 1 < 4; ++i)
        if (err[i + 1] > err[i] + 2.0 * (se[i] + se[i + 1])) monotone = false;
    const bool close = err[3] <= 0.05 * oracle;
    return {close && monotone,
            strf("oracle=%.6f errs=%.1e/%.1e/%.1e/%.1e rel_final=%.3f%%", oracle,
                 err[0], err[1], err[2], err[3], 100.0 * err[3] / oracle)};
}

// ---- 7: deterministic finite-n error halves as n doubles -------------------

Outcome finite_n_error_halving() {
    const auto mu = AtomicMeasure::semicircle_grid(100000);
    const double theta = 0.3;
    const double lim = rank_one_limit(mu, theta, 1, tol).value;
    double errs[4];
    const int ns[4] = {100, 200, 400, 800};
    for (int i = 0; i < 4; ++i)
        errs[i] = std::fabs(
            finite_n_leading_term(quantile_discretize(mu, ns[i]), theta, 1, tol) -
            lim);
    bool ok = true;
    double ratios[3];
    for (int i = 0; i < 3; ++i) {
        ratios[i] = errs[i] / errs[i + 1];
        if (!(ratios[i] >= 1.5 && ratios[i] <= 2.5)) ok = false;
    }
    return {ok, strf("ratios=%.2f/%.2f/%.2f", ratios[0], ratios[1], ratios[2])};
}

// ---- 8: limit and R are additive across an independent rotation ------------

Outcome spectrum_sum_additivity() {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const auto rep = additivity_experiment(
        b, b, 400, {0.05, 0.1, 0.15, 0.2, 0.25}, 20, 4242, tol);
    double gap = 0.0, r_gap = 0.0;
    int excluded = 0;
    for (const auto& row : rep.rows) {
        if (row.theta <= 0.2 + 1e-12) gap = std::max(gap, row.gap);
        r_gap = std::max(r_gap, row.r_gap);
        excluded += row.excluded;
    }
    return {gap <= 5e-2 && r_gap <= 5e-2 && excluded == 0,
            strf("gap=%.3e r_gap=%.3e excluded=%d", gap, r_gap, excluded)};
}

// ---- 9: the per-draw limit concentrates as n grows -------------------------

Outcome large_n_concentration() {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const auto lo = concentration_experiment(b, b, 200, 0.1, 20, 99, tol);
    const auto hi = concentration_experiment(b, b, 800, 0.1, 20, 99, tol);
    const bool pass = hi.variance < lo.variance && lo.excluded == 0 &&
                      hi.excluded == 0;
    return {pass, strf("var200=%.3e var800=%.3e", lo.variance, hi.variance)};
}

// ---- 10: complex continuation: Taylor map and reflection symmetry ----------

Outcome analytic_continuation() {
    double map_err = 0.0, refl_err = 0.0;
    const AtomicMeasure ms[2] = {AtomicMeasure::bernoulli(-1.0, 1.0),
                                 AtomicMeasure::trimmed_semicircle(200)};
    for (const auto& m : ms) {
        const auto a = taylor_coefficients(m, 4, tol);
        const auto c = r_series(m, 3);
        map_err = std::max(map_err, std::fabs(a[0]));
        for (int n = 1; n <= 4; ++n)
            map_err = std::max(
                map_err, std::fabs(a[n] - std::ldexp(c[n - 1], n - 1) / n));
        // probe tilts scaled to the measure's own continuation radius
        const double r = 0.35 * complex_guard_radius(m);
        const std::complex<double> probes[3] = {std::polar(r, 0.6),
                                                std::polar(r, 2.3),
                                                std::polar(0.8 * r, -1.1)};
        for (const auto& th : probes) {
            const auto direct = complex_rank_one_limit(m, std::conj(th), tol);
            const auto refl = std::conj(complex_rank_one_limit(m, th, tol));
            refl_err = std::max(refl_err, std::abs(direct - refl));
        }
    }
    return {map_err <= 1e-6 && refl_err <= 1e-10,
            strf("taylor_err=%.2e reflection_err=%.2e", map_err, refl_err)};
}

// ---- 11: rank-3 sampler agrees with the rank-3 limit -----------------------

Outcome finite_rank_cross_validation() {
    const auto mu = AtomicMeasure::bernoulli(-1.0, 1.0);
    const std::vector<double> ths = {0.1, 0.2, 0.3};
    McConfig cfg;
    cfg.samples = 100000;
    cfg.seed = 31415;
    const auto est = finite_rank_mc(quantile_discretize(mu, 300), ths, cfg, tol);
    const double lim = finite_rank_limit(mu, ths, 1, tol);
    const double err = std::fabs(est.value - lim);
    return {err <= 0.03, strf("mc=%.5f limit=%.5f err=%.3e", est.value, lim, err)};
}

// ---- 12: first derivative continuous at the transition, curvature jumps ----

Outcome transition_derivative_jump() {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    const double thc = 2.0 / 3.0;
    const double h = 1e-5;
    auto I = [&](double th) { return rank_one_limit(t, th, 1, tol).value; };
    const double dl = (I(thc - h) - I(thc - 3 * h)) / (2 * h);
    const double dr = (I(thc + 3 * h) - I(thc + h)) / (2 * h);
    const double sl = (I(thc - h) - 2 * I(thc - 2 * h) + I(thc - 3 * h)) / (h * h);
    const double sr = (I(thc + 3 * h) - 2 * I(thc + 2 * h) + I(thc + h)) / (h * h);
    const bool pass = std::fabs(dl - dr) <= 1e-4 && std::fabs(sl - sr) >= 0.01;
    return {pass, strf("slope_jump=%.2e curvature_jump=%.3f", std::fabs(dl - dr),
                       std::fabs(sl - sr))};
}

struct Criterion {
    const char* name;
    double budget_s;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {"point-mass-exactness", 1.0, point_mass_exactness},
    {"small-tilt-integral-identity", 10.0, small_tilt_identity},
    {"semicircle-quadratic-law", 5.0, semicircle_quadratic_law},
    {"legendre-duality-and-envelope", 30.0, legendre_duality},
    {"recentering-shift-identity", 10.0, shift_identity},
    {"fluctuation-prefactor-convergence", 300.0, prefactor_convergence},
    {"finite-n-error-halving", 5.0, finite_n_error_halving},
    {"spectrum-sum-additivity", 180.0, spectrum_sum_additivity},
    {"large-n-concentration", 300.0, large_n_concentration},
    {"analytic-continuation-taylor", 10.0, analytic_continuation},
    {"finite-rank-cross-validation", 120.0, finite_rank_cross_validation},
    {"transition-derivative-jump", 5.0, transition_derivative_jump},
};

} // namespace

int main() {
    int failures = 0;
    for (const auto& c : kCriteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& ex) {
            out = {false, std::string("exception: ") + ex.what()};
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        const bool in_budget = dt <= c.budget_s;
        const bool ok = out.pass && in_budget;
        std::printf("%s %-34s %7.2fs/%-4.0fs %s%s\n", ok ? "PASS" : "FAIL",
                    c.name, dt, c.budget_s, out.detail.c_str(),
                    !out.pass ? "" : (in_budget ? "" : " [over budget]"));
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    std::printf("acceptance: %d/12 criteria passed\n",
                12 - failures);
    return failures;
}
