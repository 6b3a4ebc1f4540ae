#pragma once

#include <vector>

#include "spherint/measure.hpp"
#include "spherint/tolerance.hpp"

namespace spherint {

enum class RatePiece { Interior, UpperTail, LowerTail, Infinite };

const char* rate_piece_name(RatePiece p);

struct RatePoint {
    double alpha = 0.0;
    double t_value = 0.0; // may be +infinity
    RatePiece piece = RatePiece::Infinite;
};

// h_alpha(kappa) = Int log((kappa - x)/(kappa - alpha)) dmu(x), for kappa
// strictly outside the declared support and alpha strictly inside it.
double h_alpha(const AtomicMeasure& mu, double alpha, double kappa);

// Large-deviation rate of the top shifted overlap: half of h_alpha evaluated
// at K(Q(alpha)) between alpha_min and alpha_max, at the support edge on the
// tails, +infinity outside the open support interval.  Total function.
RatePoint t_rate(const AtomicMeasure& mu, double alpha,
                 const ToleranceConfig& tol = default_tolerances());

// Rate function of a weighted chi-square average (1/n) sum x_i g_i^2 with
// weights drawn from mu and confined to [gamma_lo, gamma_hi]:
//   L(x) = sup { u x + (1/2) Int log(1 - 2 x' u) dmu(x') }
// over u keeping every log argument positive for x' in [gamma_lo, gamma_hi];
// the sup saturates at a feasibility endpoint into exactly linear tails of
// slope 1/(2 gamma_hi) above and 1/(2 gamma_lo) below.  May return +infinity.
double j_rate(const AtomicMeasure& mu, double gamma_lo, double gamma_hi, double x,
              const ToleranceConfig& tol = default_tolerances());

// Checks the shift identity: recentering mu at alpha turns the chi-square rate
// at 0 into t_rate(mu, alpha).  True when they agree within 1e-7 (two infinite
// values also count as agreement).
bool shift_identity_check(const AtomicMeasure& mu, double alpha,
                          const ToleranceConfig& tol = default_tolerances());

struct LegendreResult {
    double value = 0.0;
    double argmax = 0.0;
};

// sup over alpha of theta*alpha - T(alpha): grid scan plus golden-section
// refinement plus the closed-form stationary candidates (R(2 theta) interior,
// lambda_* - 1/(2 theta) on the saturated sides).  Equals the beta = 1
// rank-one limit.
LegendreResult legendre_sup(const AtomicMeasure& mu, double theta,
                            const ToleranceConfig& tol = default_tolerances());

struct GPieces {
    double g = 0.0;  // (1/2) Int_0^{2 theta} R(u) du on the branch interval, else -inf
    double g1 = 0.0; // theta*(lambda_max - 1/(2 theta)) - (1/2) Int log(2 theta (lambda_max - x)) dmu
    double g2 = 0.0; // mirrored at lambda_min for theta < 0
};

// Closed-form envelope pieces of the rank-one limit; pieces whose defining
// integral diverges (unbounded branch endpoint) are -infinity by convention.
// max(g, g1, g2) equals legendre_sup's value.
GPieces g_pieces(const AtomicMeasure& mu, double theta,
                 const ToleranceConfig& tol = default_tolerances());

} // namespace spherint
