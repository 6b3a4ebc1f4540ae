#include <cmath>
#include <vector>

#include <doctest.h>

#include "spherint/asymptote.hpp"
#include "spherint/errors.hpp"
#include "spherint/measure.hpp"
#include "spherint/ratefn.hpp"
#include "spherint/rng.hpp"
#include "spherint/transform.hpp"

#include "test_helpers.hpp"

using namespace spherint;

namespace {
const ToleranceConfig& tol = default_tolerances();
} // namespace

TEST_CASE("log-potential difference closed form") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    // integral of log(2 - lambda) minus log(2 - 0)
    CHECK(h_alpha(b, 0.0, 2.0) ==
          doctest::Approx(0.5 * std::log(3.0) - std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(h_alpha(b, 0.0, 0.5), DomainError);  // kappa inside support
    CHECK_THROWS_AS(h_alpha(b, 1.0, 2.0), DomainError);  // alpha at the edge
}

TEST_CASE("overlap rate closed form and basic shape on the two-point measure") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const auto p = t_rate(b, 0.5, tol);
    CHECK(p.piece == RatePiece::Interior);
    CHECK(p.t_value == doctest::Approx(0.25 * std::log(4.0 / 3.0)).epsilon(1e-10));

    CHECK(t_rate(b, 0.0, tol).t_value == 0.0); // zero cost at the mean
    // symmetry of the measure transfers to the rate
    for (double a : {0.2, 0.55, 0.8}) {
        CHECK(t_rate(b, a, tol).t_value ==
              doctest::Approx(t_rate(b, -a, tol).t_value).epsilon(1e-10));
    }
    // convex and increasing away from the mean
    double prev = -1.0;
    for (double a = 0.0; a < 0.96; a += 0.05) {
        const double v = t_rate(b, a, tol).t_value;
        CHECK(v >= prev);
        prev = v;
    }
    // blows up at the support edges (open interval)
    CHECK(std::isinf(t_rate(b, 1.0, tol).t_value));
    CHECK(t_rate(b, 1.0, tol).piece == RatePiece::Infinite);
    CHECK(std::isinf(t_rate(b, -1.0, tol).t_value));
    CHECK(std::isinf(t_rate(b, 1.5, tol).t_value));
}

TEST_CASE("overlap rate pieces split at the branch image endpoints") {
    const auto t = AtomicMeasure::trimmed_bernoulli(); // alpha range (-0.25, 0.25)
    CHECK(t_rate(t, 0.1, tol).piece == RatePiece::Interior);
    CHECK(t_rate(t, 0.25, tol).piece == RatePiece::Interior); // closed at the image edge
    CHECK(t_rate(t, 0.4, tol).piece == RatePiece::UpperTail);
    CHECK(t_rate(t, -0.4, tol).piece == RatePiece::LowerTail);
    CHECK(t_rate(t, 1.0, tol).piece == RatePiece::Infinite); // declared edge stays infinite
    CHECK(t_rate(t, 1.2, tol).piece == RatePiece::Infinite);

    // continuity across the interior/tail seam
    const double eps = 1e-7;
    const double a = t_rate(t, 0.25 - eps, tol).t_value;
    const double c = t_rate(t, 0.25 + eps, tol).t_value;
    CHECK(std::fabs(a - c) < 1e-5);

    // tails still rise toward the declared edge
    CHECK(t_rate(t, 0.9, tol).t_value > t_rate(t, 0.5, tol).t_value);
}

TEST_CASE("overlap rate of a point mass is an indicator") {
    const auto d = AtomicMeasure::dirac(0.3);
    CHECK(t_rate(d, 0.3, tol).t_value == 0.0);
    CHECK(std::isinf(t_rate(d, 0.31, tol).t_value));
}

TEST_CASE("linear statistics rate on the unit point mass") {
    const auto d = AtomicMeasure::dirac(1.0);
    for (double x : {0.3, 0.9, 1.0, 1.7, 3.0}) {
        const double expect = 0.5 * (x - 1.0 - std::log(x));
        CHECK(j_rate(d, 1.0, 1.0, x, tol) == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(std::isinf(j_rate(d, 1.0, 1.0, -0.2, tol)));
    CHECK(std::isinf(j_rate(d, 1.0, 1.0, 0.0, tol)));
}

TEST_CASE("linear statistics rate is nonnegative with a root at the mean") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    CHECK(j_rate(b, -1.0, 1.0, b.mean(), tol) == 0.0);
    for (double x : {-1.5, -0.4, 0.3, 1.8}) {
        const double v = j_rate(b, -1.0, 1.0, x, tol);
        CHECK(v >= 0.0);
        if (x != 0.0) CHECK(v > 0.0);
    }
}

TEST_CASE("linear statistics rate has exactly linear tails with slope 1/(2 gamma)") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const double ghi = 1.5, glo = -1.5;
    // large x: L(x) = x/(2 ghi) + const, so increments are exactly linear
    const double l1 = j_rate(b, glo, ghi, 40.0, tol);
    const double l2 = j_rate(b, glo, ghi, 41.0, tol);
    const double l3 = j_rate(b, glo, ghi, 42.0, tol);
    CHECK(std::fabs((l2 - l1) - 1.0 / (2.0 * ghi)) < 1e-9);
    CHECK(std::fabs((l3 - l2) - (l2 - l1)) < 1e-10);
    const double m1 = j_rate(b, glo, ghi, -40.0, tol);
    const double m2 = j_rate(b, glo, ghi, -41.0, tol);
    CHECK(std::fabs((m2 - m1) - 1.0 / (2.0 * -glo)) < 1e-9);
}

TEST_CASE("linear statistics rate matches an independent chi-square tail oracle") {
    // for the unit point mass the statistic is a chi-square mean: the exact
    // finite-n tail from the regularized incomplete gamma should approach
    // n * rate
    const auto d = AtomicMeasure::dirac(1.0);
    const double x = 1.5;
    const double rate = j_rate(d, 1.0, 1.0, x, tol);
    CHECK(rate == doctest::Approx(0.5 * (0.5 - std::log(1.5))).epsilon(1e-9));
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int n : {400, 1600, 6400}) {
        const double tail = testutil::gammq(n / 2.0, n * x / 2.0);
        const double emp_rate = -std::log(tail) / n;
        // the exponential bound holds at every n, so the gap is one-sided...
        CHECK(emp_rate >= rate);
        // ...and the O(log(n)/n) prefactor contribution shrinks with n
        const double gap = emp_rate - rate;
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap / rate < 0.05); // n = 6400: within 5 percent
}

TEST_CASE("infeasible directions of the linear statistics rate are infinite") {
    const auto b = AtomicMeasure::bernoulli(0.5, 1.0); // positive support
    // with gamma_lo <= 0 the tilt is unbounded below: any x <= 0 is
    // super-exponentially unlikely
    CHECK(std::isinf(j_rate(b, 0.0, 1.0, -0.5, tol)));
    CHECK(std::isfinite(j_rate(b, 0.0, 1.0, 0.4, tol)));
    CHECK_THROWS_AS(j_rate(b, 0.6, 1.0, 0.7, tol), DomainError); // gamma_lo > lambda_min
}

TEST_CASE("shifted-measure rate identity holds on fixed cases") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    for (double a : {0.1, 0.45, -0.6}) CHECK(shift_identity_check(b, a, tol));
    const auto t = AtomicMeasure::trimmed_bernoulli();
    for (double a : {0.1, 0.3, -0.45, 0.8}) CHECK(shift_identity_check(t, a, tol));
    CHECK_THROWS_AS(shift_identity_check(b, 1.0, tol), DomainError);
}

TEST_CASE("shifted-measure rate identity holds on random measures") {
    CounterRng rng(31, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const auto mu = testutil::random_measure(rng);
        const double u = 0.05 + 0.9 * rng.next_unit();
        const double a = mu.lambda_min() + u * (mu.lambda_max() - mu.lambda_min());
        CHECK(shift_identity_check(mu, a, tol));
    }
}

TEST_CASE("legendre supremum matches the limit in the interior") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const auto leg = legendre_sup(b, 0.25, tol);
    CHECK(leg.value == doctest::Approx(rank_one_limit(b, 0.25, 1, tol).value).epsilon(1e-7));
    CHECK(leg.argmax == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-6));

    const auto leg0 = legendre_sup(b, 0.0, tol);
    CHECK(leg0.value == 0.0);
    CHECK(leg0.argmax == doctest::Approx(b.mean()).epsilon(1e-12));
}

TEST_CASE("legendre supremum matches the limit across regimes") {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    for (double th : {-1.2, -0.8, -0.5, -0.2, 0.1, 0.4, 2.0 / 3.0, 0.75, 1.0, 1.5}) {
        const double lim = rank_one_limit(t, th, 1, tol).value;
        const auto leg = legendre_sup(t, th, tol);
        CHECK(std::fabs(leg.value - lim) <= 1e-6 * std::max(1.0, std::fabs(lim)));
    }
}

TEST_CASE("legendre supremum of a point mass is linear") {
    const auto d = AtomicMeasure::dirac(-0.4);
    const auto leg = legendre_sup(d, 0.7, tol);
    CHECK(leg.value == doctest::Approx(-0.28).epsilon(1e-14));
    CHECK(leg.argmax == -0.4);
}

TEST_CASE("variational pieces cover the regimes") {
    const auto t = AtomicMeasure::trimmed_bernoulli();

    // interior: the branch piece carries the value, the tail pieces trail it
    const auto in = g_pieces(t, 0.4, tol);
    CHECK(in.g == doctest::Approx(rank_one_limit(t, 0.4, 1, tol).value).epsilon(1e-8));
    CHECK(in.g1 < in.g);
    CHECK(in.g2 < in.g1);
    // frozen closed form of the boundary tail value at this theta
    CHECK(in.g1 == doctest::Approx(0.4 * 0.25 - 0.25 * std::log(4.0 / 3.0)).epsilon(1e-12));

    // saturated: the upper tail term leads, the branch piece continues
    // linearly below it
    const auto sat = g_pieces(t, 1.0, tol);
    CHECK(std::isfinite(sat.g));
    CHECK(sat.g < sat.g1);
    CHECK(sat.g1 == doctest::Approx(rank_one_limit(t, 1.0, 1, tol).value).epsilon(1e-8));
    const auto satm = g_pieces(t, -1.0, tol);
    CHECK(satm.g2 == doctest::Approx(rank_one_limit(t, -1.0, 1, tol).value).epsilon(1e-8));
    CHECK(satm.g < satm.g2);

    // max of the pieces equals the legendre supremum everywhere tested
    for (double th : {-1.0, -0.5, 0.2, 2.0 / 3.0, 0.9, 1.4}) {
        const auto gp = g_pieces(t, th, tol);
        const double mx = std::max(gp.g, std::max(gp.g1, gp.g2));
        CHECK(std::fabs(mx - legendre_sup(t, th, tol).value) <= 1e-6);
    }

    // theta = 0: the branch piece vanishes and dominates the (symmetric,
    // strictly negative) boundary tail values
    const auto z = g_pieces(t, 0.0, tol);
    CHECK(z.g == 0.0);
    CHECK(z.g1 < 0.0);
    CHECK(z.g1 == doctest::Approx(z.g2).epsilon(1e-14));
    const auto dg = g_pieces(AtomicMeasure::dirac(0.5), 0.8, tol);
    CHECK(dg.g == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(std::isinf(dg.g1));
    CHECK(std::isinf(dg.g2));
}

TEST_CASE("measures with atoms at the edges have no finite tail pieces") {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    const auto gp = g_pieces(b, 0.5, tol);
    CHECK(std::isinf(gp.g1)); // infinite branch endpoint: footnote term diverges
    CHECK(std::isinf(gp.g2));
    CHECK(gp.g == doctest::Approx(rank_one_limit(b, 0.5, 1, tol).value).epsilon(1e-8));
}
