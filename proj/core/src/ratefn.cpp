#include "spherint/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "spherint/asymptote.hpp"
#include "spherint/errors.hpp"
#include "spherint/numerics.hpp"
#include "spherint/transform.hpp"

namespace spherint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Int log((kappa - x)/(kappa - alpha)) dmu without domain validation; callers
// guarantee every ratio is positive (kappa on one side of all atoms and alpha).
double h_eval(const AtomicMeasure& mu, double alpha, double kappa) {
    double acc = 0.0;
    const double denom = kappa - alpha;
    for (const Atom& a : mu.atoms()) {
        const double ratio = (kappa - a.x) / denom;
        if (!(ratio > 0.0) || !std::isfinite(ratio))
            throw PrecisionError("h_alpha: log ratio left the positive axis");
        acc += a.w * std::log(ratio);
    }
    return acc;
}

} // namespace

const char* rate_piece_name(RatePiece p) {
    switch (p) {
    case RatePiece::Interior: return "Interior";
    case RatePiece::UpperTail: return "UpperTail";
    case RatePiece::LowerTail: return "LowerTail";
    case RatePiece::Infinite: return "Infinite";
    }
    return "?";
}

double h_alpha(const AtomicMeasure& mu, double alpha, double kappa) {
    const double lo = mu.lambda_min();
    const double hi = mu.lambda_max();
    if (kappa >= lo && kappa <= hi)
        throw DomainError("h_alpha: kappa inside the declared support");
    if (!(alpha > lo && alpha < hi))
        throw DomainError("h_alpha: alpha outside the open support interval");
    return h_eval(mu, alpha, kappa);
}

RatePoint t_rate(const AtomicMeasure& mu, double alpha, const ToleranceConfig& tol) {
    RatePoint rp;
    rp.alpha = alpha;

    if (mu.atoms().size() == 1) {
        if (alpha == mu.atoms()[0].x) {
            rp.t_value = 0.0;
            rp.piece = RatePiece::Interior;
        } else {
            rp.t_value = kInf;
            rp.piece = RatePiece::Infinite;
        }
        return rp;
    }

    const TransformDomain d = domain(mu);
    if (!(alpha > d.lambda_min && alpha < d.lambda_max)) {
        rp.t_value = kInf;
        rp.piece = RatePiece::Infinite;
        return rp;
    }
    if (alpha == d.mean) {
        rp.t_value = 0.0;
        rp.piece = RatePiece::Interior;
        return rp;
    }

    if (alpha > d.mean) {
        if (alpha < d.alpha_max) {
            const double q = q_transform(mu, alpha, tol);
            const double kappa = k_transform(mu, q, tol);
            rp.t_value = 0.5 * h_eval(mu, alpha, kappa);
            rp.piece = RatePiece::Interior;
        } else if (alpha == d.alpha_max) {
            // finite branch endpoint: K saturates exactly at the support edge
            rp.t_value = 0.5 * h_eval(mu, alpha, d.lambda_max);
            rp.piece = RatePiece::Interior;
        } else {
            // alpha_max < alpha < lambda_max requires a finite upper endpoint;
            // an unbounded one pins alpha_max = lambda_max and empties this piece
            rp.t_value = 0.5 * h_eval(mu, alpha, d.lambda_max);
            rp.piece = RatePiece::UpperTail;
        }
        return rp;
    }

    if (alpha > d.alpha_min) {
        const double q = q_transform(mu, alpha, tol);
        const double kappa = k_transform(mu, q, tol);
        rp.t_value = 0.5 * h_eval(mu, alpha, kappa);
        rp.piece = RatePiece::Interior;
    } else if (alpha == d.alpha_min) {
        rp.t_value = 0.5 * h_eval(mu, alpha, d.lambda_min);
        rp.piece = RatePiece::Interior;
    } else {
        rp.t_value = 0.5 * h_eval(mu, alpha, d.lambda_min);
        rp.piece = RatePiece::LowerTail;
    }
    return rp;
}

double j_rate(const AtomicMeasure& mu, double gamma_lo, double gamma_hi, double x,
              const ToleranceConfig& tol) {
    const double lo = mu.lambda_min();
    const double hi = mu.lambda_max();
    if (!(gamma_lo <= gamma_hi))
        throw DomainError("j_rate: gamma_lo above gamma_hi");
    if (gamma_lo > lo || gamma_hi < hi)
        throw DomainError("j_rate: [gamma_lo, gamma_hi] does not enclose the support");

    const double mean = mu.mean();
    if (x == mean) return 0.0;

    // feasible u keeps 1 - 2*g*u positive across [gamma_lo, gamma_hi]
    const double u_lo = gamma_lo < 0.0 ? 1.0 / (2.0 * gamma_lo) : -kInf;
    const double u_hi = gamma_hi > 0.0 ? 1.0 / (2.0 * gamma_hi) : kInf;

    if (std::isinf(u_lo) && x <= 0.0) return kInf;
    if (std::isinf(u_hi) && x >= 0.0) return kInf;

    auto f = [&](double u) {
        double acc = u * x;
        for (const Atom& a : mu.atoms()) {
            const double arg = 1.0 - 2.0 * a.x * u;
            if (!(arg > 0.0))
                throw PrecisionError("j_rate: objective left its domain");
            acc += 0.5 * a.w * std::log(arg);
        }
        return acc;
    };
    auto fp = [&](double u) {
        double acc = x;
        for (const Atom& a : mu.atoms())
            acc -= a.w * a.x / (1.0 - 2.0 * a.x * u);
        return acc;
    };
    auto fpp = [&](double u) {
        double acc = 0.0;
        for (const Atom& a : mu.atoms()) {
            const double denom = 1.0 - 2.0 * a.x * u;
            acc -= 2.0 * a.w * a.x * a.x / (denom * denom);
        }
        return acc;
    };

    double a, b;
    if (std::isfinite(u_lo) && std::isfinite(u_hi)) {
        const double eps = 1e-12 * (u_hi - u_lo);
        a = u_lo + eps;
        b = u_hi - eps;
    } else if (std::isfinite(u_hi)) {
        b = u_hi - 1e-12 * std::max(1.0, std::fabs(u_hi));
        a = std::min(-1.0, b - 1.0);
        for (int i = 0; i < 80 && fp(a) <= 0.0; ++i) a *= 2.0;
    } else {
        a = u_lo + 1e-12 * std::max(1.0, std::fabs(u_lo));
        b = std::max(1.0, a + 1.0);
        for (int i = 0; i < 80 && fp(b) >= 0.0; ++i) b *= 2.0;
    }

    const double fpa = fp(a);
    const double fpb = fp(b);

    if (fpb >= 0.0) {
        if (!std::isfinite(u_hi))
            throw ConvergenceError("j_rate: failed to bracket the maximizer from above");
        // sup pinned at the upper feasibility endpoint: exactly linear beyond
        double acc = x / (2.0 * gamma_hi);
        for (const Atom& a2 : mu.atoms()) {
            const double arg = 1.0 - a2.x / gamma_hi;
            if (!(arg > 0.0)) return std::max(f(b), 0.0);
            acc += 0.5 * a2.w * std::log(arg);
        }
        return std::max(acc, 0.0);
    }
    if (fpa <= 0.0) {
        if (!std::isfinite(u_lo))
            throw ConvergenceError("j_rate: failed to bracket the maximizer from below");
        double acc = x / (2.0 * gamma_lo);
        for (const Atom& a2 : mu.atoms()) {
            const double arg = 1.0 - a2.x / gamma_lo;
            if (!(arg > 0.0)) return std::max(f(a), 0.0);
            acc += 0.5 * a2.w * std::log(arg);
        }
        return std::max(acc, 0.0);
    }

    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    const auto root = num::bracketed_root(fp, fpp, a, b, tol.root_abs_tol * scale,
                                          1e-3 * (b - a), 300);
    return std::max(f(root.x), 0.0);
}

bool shift_identity_check(const AtomicMeasure& mu, double alpha,
                          const ToleranceConfig& tol) {
    const double lo = mu.lambda_min();
    const double hi = mu.lambda_max();
    if (!(alpha > lo && alpha < hi))
        throw DomainError("shift_identity_check: alpha outside the open support interval");

    std::vector<double> xs, ws;
    xs.reserve(mu.atoms().size());
    ws.reserve(mu.atoms().size());
    for (const Atom& a : mu.atoms()) {
        xs.push_back(a.x - alpha);
        ws.push_back(a.w);
    }
    const AtomicMeasure nu =
        AtomicMeasure::from_atoms(xs, ws).with_support(lo - alpha, hi - alpha);

    const double j = j_rate(nu, lo - alpha, hi - alpha, 0.0, tol);
    const double t = t_rate(mu, alpha, tol).t_value;
    if (std::isinf(j) && std::isinf(t)) return true;
    return std::fabs(j - t) <= 1e-7;
}

LegendreResult legendre_sup(const AtomicMeasure& mu, double theta,
                            const ToleranceConfig& tol) {
    if (mu.atoms().size() == 1)
        return {theta * mu.atoms()[0].x, mu.atoms()[0].x};
    if (theta == 0.0) return {0.0, mu.mean()};

    const TransformDomain d = domain(mu);
    auto phi = [&](double alpha) {
        // near the support edges the rate blows up and its evaluation may
        // fail to converge; such points cannot carry the supremum, so they
        // are scored as -inf instead of aborting the scan
        try {
            const RatePoint rp = t_rate(mu, alpha, tol);
            return std::isinf(rp.t_value) ? -kInf : theta * alpha - rp.t_value;
        } catch (const SpherintError&) {
            return -kInf;
        }
    };

    const double span = d.lambda_max - d.lambda_min;
    const double lo = d.lambda_min + 1e-9 * span;
    const double hi = d.lambda_max - 1e-9 * span;

    const int n_grid = 1200;
    double best_alpha = lo;
    double best_val = phi(lo);
    for (int i = 1; i <= n_grid; ++i) {
        const double alpha = lo + (hi - lo) * i / n_grid;
        const double v = phi(alpha);
        if (v > best_val) {
            best_val = v;
            best_alpha = alpha;
        }
    }
    const double h = (hi - lo) / n_grid;
    const double ga = std::max(lo, best_alpha - h);
    const double gb = std::min(hi, best_alpha + h);
    const auto refined = num::concave_maximize(phi, ga, gb, 60);
    best_alpha = refined.x;
    best_val = refined.value;

    // analytic stationary candidates beat grid aliasing when applicable
    const double gamma = 2.0 * theta;
    std::vector<double> candidates;
    if (gamma > d.h_min && gamma < d.h_max)
        candidates.push_back(r_transform(mu, gamma, tol));
    else if (gamma == d.h_max)
        candidates.push_back(d.alpha_max);
    else if (gamma == d.h_min)
        candidates.push_back(d.alpha_min);
    else if (theta > 0.0)
        candidates.push_back(d.lambda_max - 1.0 / gamma);
    else
        candidates.push_back(d.lambda_min - 1.0 / gamma);

    for (double c : candidates) {
        if (!(c > d.lambda_min && c < d.lambda_max)) continue;
        const double v = phi(c);
        if (v >= best_val - 1e-10 * std::max(1.0, std::fabs(best_val))) {
            best_val = std::max(best_val, v);
            best_alpha = c;
        }
    }
    return {best_val, best_alpha};
}

GPieces g_pieces(const AtomicMeasure& mu, double theta, const ToleranceConfig& tol) {
    const TransformDomain d = domain(mu);
    const double gamma = 2.0 * theta;

    // integral of log(c * (edge - lambda)) dmu for a finite branch endpoint c;
    // a finite endpoint implies no atom sits on that declared edge, so every
    // argument is strictly positive
    auto edge_log_moment = [&](double c, double edge) {
        double acc = 0.0;
        for (const Atom& a : mu.atoms()) acc += a.w * std::log(c * (edge - a.x));
        return acc;
    };

    GPieces out{-kInf, -kInf, -kInf};

    // branch piece: half integral of the branch inverse inside the branch
    // interval, continued linearly (value frozen at the image endpoint)
    // beyond a finite endpoint
    if (theta == 0.0) {
        out.g = 0.0;
    } else if (gamma > d.h_min && gamma < d.h_max) {
        auto r_of = [&](double u) { return u == 0.0 ? d.mean : r_transform(mu, u, tol); };
        out.g = 0.5 * num::adaptive_simpson(r_of, 0.0, gamma, tol.quad_abs_tol);
    } else if (gamma >= d.h_max) {
        out.g = theta * d.alpha_max - 0.5 * edge_log_moment(d.h_max, d.lambda_max);
    } else {
        out.g = theta * d.alpha_min - 0.5 * edge_log_moment(d.h_min, d.lambda_min);
    }

    // tail pieces: suprema over the image gaps; the stationary point enters
    // the gap only past the branch endpoint, otherwise the supremum sits at
    // the image boundary and is linear in theta
    if (std::isfinite(d.h_max)) {
        out.g1 = gamma > d.h_max
                     ? theta * d.lambda_max - 0.5 - 0.5 * edge_log_moment(gamma, d.lambda_max)
                     : theta * d.alpha_max - 0.5 * edge_log_moment(d.h_max, d.lambda_max);
    }
    if (std::isfinite(d.h_min)) {
        out.g2 = gamma < d.h_min
                     ? theta * d.lambda_min - 0.5 - 0.5 * edge_log_moment(gamma, d.lambda_min)
                     : theta * d.alpha_min - 0.5 * edge_log_moment(d.h_min, d.lambda_min);
    }
    return out;
}

} // namespace spherint
