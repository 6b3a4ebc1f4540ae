#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "spherint/asymptote.hpp"
#include "spherint/errors.hpp"
#include "spherint/measure.hpp"
#include "spherint/rng.hpp"
#include "spherint/transform.hpp"

#include "test_helpers.hpp"

using namespace spherint;

namespace {
const ToleranceConfig& tol = default_tolerances();

double num_deriv(const AtomicMeasure& mu, double theta, double h, int beta = 1) {
    return (rank_one_limit(mu, theta + h, beta, tol).value -
            rank_one_limit(mu, theta - h, beta, tol).value) /
           (2.0 * h);
}
} // namespace

TEST_CASE("point mass limit is exactly linear in theta") {
    const auto d = AtomicMeasure::dirac(-0.37);
    for (double th : {-2.0, -0.5, 0.0, 0.25, 1.0, 10.0}) {
        const auto r = rank_one_limit(d, th, 1, tol);
        CHECK(std::fabs(r.value - th * -0.37) <= 1e-14 * std::max(1.0, std::fabs(th)));
        CHECK(r.v_theta == -0.37);
        CHECK(r.regime == Regime::Interior);
    }
}

TEST_CASE("theta zero row is identically zero and classified interior") {
    for (const auto& mu : {AtomicMeasure::bernoulli(-1.0, 1.0),
                           AtomicMeasure::trimmed_bernoulli(),
                           AtomicMeasure::semicircle_grid(200)}) {
        const auto r = rank_one_limit(mu, 0.0, 1, tol);
        CHECK(r.value == 0.0);
        CHECK(r.regime == Regime::Interior);
        CHECK(r.v_theta == doctest::Approx(mu.mean()).epsilon(1e-14));
        CHECK(std::isinf(r.k_point));
    }
}

TEST_CASE("regime classification against the branch endpoints") {
    const auto t = AtomicMeasure::trimmed_bernoulli(); // H endpoints +-4/3
    CHECK(rank_one_limit(t, 0.5, 1, tol).regime == Regime::Interior);
    CHECK(rank_one_limit(t, 2.0 / 3.0, 1, tol).regime == Regime::BoundaryMax);
    CHECK(rank_one_limit(t, 0.9, 1, tol).regime == Regime::SaturatedMax);
    CHECK(rank_one_limit(t, -2.0 / 3.0, 1, tol).regime == Regime::BoundaryMin);
    CHECK(rank_one_limit(t, -0.9, 1, tol).regime == Regime::SaturatedMin);

    // beta rescales the threshold: saturation needs 2 theta / beta > H_max
    CHECK(rank_one_limit(t, 0.9, 2, tol).regime == Regime::Interior);
    CHECK(rank_one_limit(t, 1.5, 2, tol).regime == Regime::SaturatedMax);

    // atoms at the declared edges keep every theta interior
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    CHECK(rank_one_limit(b, 25.0, 1, tol).regime == Regime::Interior);
    CHECK(rank_one_limit(b, -25.0, 1, tol).regime == Regime::Interior);
}

TEST_CASE("interior maximizer is the r transform and k_point sits off support") {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    const auto r = rank_one_limit(t, 0.4, 1, tol);
    CHECK(r.v_theta == doctest::Approx(r_transform(t, 0.8, tol)).epsilon(1e-12));
    CHECK(r.k_point == doctest::Approx(k_transform(t, 0.8, tol)).epsilon(1e-12));
    CHECK(r.k_point > t.lambda_max());

    const auto s = rank_one_limit(t, 0.9, 1, tol); // saturated
    CHECK(s.v_theta == doctest::Approx(t.lambda_max() - 1.0 / 1.8).epsilon(1e-14));
    CHECK(s.k_point == doctest::Approx(t.lambda_max()).epsilon(1e-14));
}

TEST_CASE("limit is convex and increasing in theta on the positive side") {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    double prev = -1.0, prev_diff = 0.0;
    bool first = true;
    for (double th = 0.05; th < 1.3; th += 0.05) {
        const double v = rank_one_limit(t, th, 1, tol).value;
        if (!first) {
            CHECK(v > prev);
            const double diff = v - prev;
            if (prev_diff > 0.0) CHECK(diff > prev_diff - 1e-12); // convexity
            prev_diff = diff;
        }
        prev = v;
        first = false;
    }
}

TEST_CASE("interior limit equals the half integral of the r transform") {
    const auto cases = std::vector<AtomicMeasure>{
        AtomicMeasure::bernoulli(-1.0, 1.0),
        AtomicMeasure::bernoulli(-0.5, 1.5, 0.3),
        AtomicMeasure::uniform_grid(-1.0, 1.0, 60),
        AtomicMeasure::semicircle_grid(300),
    };
    for (const auto& mu : cases) {
        for (int beta : {1, 2}) {
            for (double th : {0.05, 0.2, 0.4, -0.15, -0.35}) {
                const double a = rank_one_limit(mu, th, beta, tol).value;
                const double b = small_theta_integral(mu, th, beta, tol);
                CHECK(std::fabs(a - b) <= 1e-8);
            }
        }
    }
}

TEST_CASE("semicircle limit reproduces the quadratic law") {
    const auto s = AtomicMeasure::semicircle_grid(2000);
    for (double th = -0.45; th <= 0.451; th += 0.09) {
        const double v = rank_one_limit(s, th, 1, tol).value;
        CHECK(std::fabs(v - th * th) < 2e-3);
    }
}

TEST_CASE("saturated slope is the support edge minus the vanishing correction") {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    // saturated regime: dI/dtheta = lambda_max - 1/(2 theta), approaching the
    // edge as theta grows
    const double d1 = num_deriv(t, 3.0, 1e-6);
    CHECK(std::fabs(d1 - (t.lambda_max() - 1.0 / 6.0)) < 1e-7);
    const double d2 = num_deriv(t, -3.0, 1e-6);
    CHECK(std::fabs(d2 - (t.lambda_min() + 1.0 / 6.0)) < 1e-7);
    const double d3 = num_deriv(t, 40.0, 1e-6);
    CHECK(std::fabs(d3 - t.lambda_max()) < 1.0 / 79.0); // 1/(2*40) + slack
}

TEST_CASE("first derivative is continuous across the transition, second jumps") {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    const double thc = 2.0 / 3.0; // H_max / 2
    const double h = 1e-5;
    const double dl = (rank_one_limit(t, thc - h, 1, tol).value -
                       rank_one_limit(t, thc - 3 * h, 1, tol).value) /
                      (2 * h);
    const double dr = (rank_one_limit(t, thc + 3 * h, 1, tol).value -
                       rank_one_limit(t, thc + h, 1, tol).value) /
                      (2 * h);
    CHECK(std::fabs(dl - dr) < 1e-4);

    auto second = [&](double c) {
        return (rank_one_limit(t, c + h, 1, tol).value - 2 * rank_one_limit(t, c, 1, tol).value +
                rank_one_limit(t, c - h, 1, tol).value) /
               (h * h);
    };
    const double sl = second(thc - 2 * h), sr = second(thc + 2 * h);
    CHECK(std::fabs(sl - sr) > 0.01);
    // frozen magnitude of the curvature jump for this measure
    CHECK(std::fabs(sl - sr) == doctest::Approx(0.9).epsilon(0.05));
}

TEST_CASE("finite-n leading term approaches the limit") {
    const auto s = AtomicMeasure::semicircle_grid(100000);
    const double lim = rank_one_limit(s, 0.3, 1, tol).value;
    double prev = 1e9;
    for (int n : {100, 400, 1600}) {
        const auto e = quantile_discretize(s, n);
        const double err = std::fabs(finite_n_leading_term(e, 0.3, 1, tol) - lim);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 5e-4);
}

TEST_CASE("finite-n leading term on a constant spectrum is exact") {
    Spectrum e;
    e.eigenvalues.assign(40, 0.7);
    CHECK(std::fabs(finite_n_leading_term(e, 0.45, 1, tol) - 0.45 * 0.7) < 1e-14);
    CHECK(std::fabs(finite_n_leading_term(e, -1.2, 2, tol) - (-1.2 * 0.7)) < 1e-14);
}

TEST_CASE("clt prefactor oracle on the symmetric two-point measure") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const auto pf = clt_prefactor(b, 0.25, tol);
    CHECK(pf.z_value == doctest::Approx((2.0 - std::sqrt(2.0)) / 2.0).epsilon(1e-12));
    CHECK(pf.prefactor == doctest::Approx(std::cos(std::acos(-1.0) / 8.0)).epsilon(1e-12));
    // negative theta mirrors by symmetry of the measure
    const auto pm = clt_prefactor(b, -0.25, tol);
    CHECK(pm.prefactor == doctest::Approx(pf.prefactor).epsilon(1e-12));
}

TEST_CASE("clt prefactor lies in (0,1] and z dominates 4 theta^2") {
    CounterRng rng(77, 0);
    int asserted = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const auto mu = testutil::random_measure(rng, 5, false);
        const double th = (rng.next_unit() - 0.5) * 0.4;
        if (std::fabs(th) < 0.01) continue;
        if (rank_one_limit(mu, th, 1, tol).regime != Regime::Interior) continue;
        ++asserted;
        const auto pf = clt_prefactor(mu, th, tol);
        CHECK(pf.z_value > 4.0 * th * th);
        CHECK(pf.prefactor > 0.0);
        CHECK(pf.prefactor <= 1.0 + 1e-12);
    }
    CHECK(asserted >= 10);
}

TEST_CASE("clt prefactor rejects degenerate or non-interior input") {
    CHECK_THROWS_AS(clt_prefactor(AtomicMeasure::dirac(0.3), 0.2, tol), DiracDegenerate);
    const auto t = AtomicMeasure::trimmed_bernoulli();
    CHECK_THROWS_AS(clt_prefactor(t, 0.9, tol), DomainError);  // saturated
    CHECK_THROWS_AS(clt_prefactor(t, 2.0 / 3.0, tol), DomainError); // boundary
    CHECK_THROWS_AS(clt_prefactor(t, 0.0, tol), DomainError);
}

TEST_CASE("complex limit matches the real limit on the real axis") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    for (double th : {0.05, 0.2, -0.15}) {
        const auto z = complex_rank_one_limit(b, {th, 0.0}, tol);
        CHECK(std::fabs(z.real() - rank_one_limit(b, th, 1, tol).value) < 1e-10);
        CHECK(std::fabs(z.imag()) < 1e-10);
    }
}

TEST_CASE("complex limit obeys schwarz reflection") {
    for (const auto& mu :
         {AtomicMeasure::bernoulli(-1.0, 1.0), AtomicMeasure::trimmed_semicircle(200)}) {
        const double rho = complex_guard_radius(mu);
        const std::complex<double> th{rho / 6.0, rho / 9.0};
        const auto a = complex_rank_one_limit(mu, th, tol);
        const auto c = complex_rank_one_limit(mu, std::conj(th), tol);
        CHECK(std::abs(a - std::conj(c)) < 1e-10);
    }
}

TEST_CASE("complex limit on a point mass is exactly theta times the atom") {
    const auto d = AtomicMeasure::dirac(0.4);
    const std::complex<double> th{0.3, -0.2};
    const auto z = complex_rank_one_limit(d, th, tol);
    CHECK(std::abs(z - th * 0.4) < 1e-15);
}

TEST_CASE("taylor coefficients map to free cumulants") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const auto a = taylor_coefficients(b, 4, tol);
    const auto c = r_series(b, 3);
    REQUIRE(a.size() == 5);
    CHECK(std::fabs(a[0]) < 1e-9);
    for (int n = 1; n <= 4; ++n) {
        const double expect = std::ldexp(c[n - 1], n - 1) / n; // 2^(n-1) c_(n-1) / n
        CHECK(std::fabs(a[n] - expect) < 1e-7);
    }
}

TEST_CASE("finite rank limit averages the individual limits") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const std::vector<double> thetas{0.1, 0.2, 0.3};
    double mean = 0.0;
    for (double th : thetas) mean += rank_one_limit(b, th, 1, tol).value;
    mean /= 3.0;
    CHECK(finite_rank_limit(b, thetas, 1, tol) == doctest::Approx(mean).epsilon(1e-14));

    const auto t = AtomicMeasure::trimmed_bernoulli();
    CHECK_THROWS_AS(finite_rank_limit(t, {0.1, 0.9}, 1, tol), DomainError); // one saturated
    CHECK_THROWS_AS(finite_rank_limit(b, {}, 1, tol), DomainError);
    CHECK_THROWS_AS(
        finite_rank_limit(b, std::vector<double>(9, 0.1), 1, tol), DomainError);
}
