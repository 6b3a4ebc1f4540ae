#pragma once

#include <complex>
#include <vector>

#include "spherint/measure.hpp"
#include "spherint/tolerance.hpp"

namespace spherint {

enum class Regime {
    Zero,          // reserved label; theta = 0 itself classifies as Interior
    Interior,      // 2 theta / beta strictly between the branch endpoints
    BoundaryMin,   // exactly at the finite lower endpoint
    BoundaryMax,   // exactly at the finite upper endpoint
    SaturatedMin,  // below the lower endpoint: argmax pinned near lambda_min
    SaturatedMax   // above the upper endpoint: argmax pinned near lambda_max
};

const char* regime_name(Regime r);

struct AsymptoteResult {
    double value = 0.0;    // limit of (1/N) log of the spherical integral
    double v_theta = 0.0;  // optimal shift: R(2theta/beta), or lambda_* - beta/(2theta)
    double k_point = 0.0;  // v_theta + beta/(2theta): K(2theta/beta) when Interior
    Regime regime = Regime::Zero;
};

// Rank-one limit:  theta*v - (beta/2) * Int log(1 + (2theta/beta)(v - x)) dmu(x),
// with v chosen by regime.  Log arguments are asserted positive (hard failure,
// never clamped).
AsymptoteResult rank_one_limit(const AtomicMeasure& mu, double theta, int beta = 1,
                               const ToleranceConfig& tol = default_tolerances());

// Interior representation (beta/2) * Int_0^{2theta/beta} R(u) du by adaptive
// quadrature; agrees with rank_one_limit on the interior regime.
double small_theta_integral(const AtomicMeasure& mu, double theta, int beta = 1,
                            const ToleranceConfig& tol = default_tolerances());

// Deterministic n-linear exponent of the finite-n integral:
// theta*v_n - (beta/2n) sum_i log(1 + (2theta/beta)(v_n - lambda_i)).
double finite_n_leading_term(const Spectrum& e, double theta, int beta = 1,
                             const ToleranceConfig& tol = default_tolerances());

struct PrefactorResult {
    double z_value = 0.0;                // Z = Int (K(2theta) - x)^-2 dmu(x)
    double prefactor = 0.0;              // second-order constant 2|theta|/sqrt(Z)
    double leading_exponent_per_n = 0.0; // the interior rank-one limit value
};

// Second-order constant of the rank-one integral at beta = 1: the normalized
// integral e^{-n * leading} I_n tends to 2|theta|/sqrt(Z).  The constant is
// continuous toward the point-mass case (where the limit is exactly 1);
// Z > 4 theta^2 holds strictly for any non-degenerate measure.
PrefactorResult clt_prefactor(const AtomicMeasure& mu, double theta,
                              const ToleranceConfig& tol = default_tolerances());

// Analytic continuation of the beta = 1 interior limit to complex theta with
// |2 theta| inside the transform guard radius; principal-branch logs with
// arguments kept in the right half plane.  Point masses return theta*e exactly.
std::complex<double> complex_rank_one_limit(const AtomicMeasure& mu,
                                            std::complex<double> theta,
                                            const ToleranceConfig& tol = default_tolerances());

// Taylor coefficients a_0..a_n_max of the limit at theta = 0 extracted by
// contour quadrature of complex_rank_one_limit on |theta| = quarter of the
// guard radius; node count doubles from 64 until the coefficients stabilize.
// They satisfy a_n = 2^{n-1} c_{n-1} / n against the series of R.
std::vector<double> taylor_coefficients(const AtomicMeasure& mu, int n_max,
                                        const ToleranceConfig& tol = default_tolerances());

// Rank-k limit: mean of the rank-one limits over thetas (all interior).
double finite_rank_limit(const AtomicMeasure& mu, const std::vector<double>& thetas,
                         int beta = 1,
                         const ToleranceConfig& tol = default_tolerances());

} // namespace spherint
