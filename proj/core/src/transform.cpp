#include "spherint/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spherint/errors.hpp"
#include "spherint/numerics.hpp"

namespace spherint {

namespace detail {

double hilbert_raw(const std::vector<Atom>& atoms, double z) {
    double s = 0.0;
    for (const Atom& a : atoms) s += a.w / (z - a.x);
    return s;
}

double hilbert_prime_raw(const std::vector<Atom>& atoms, double z) {
    double s = 0.0;
    for (const Atom& a : atoms) {
        const double d = z - a.x;
        s -= a.w / (d * d);
    }
    return s;
}

std::complex<double> hilbert_raw_c(const std::vector<Atom>& atoms, std::complex<double> z) {
    std::complex<double> s{0.0, 0.0};
    for (const Atom& a : atoms) s += a.w / (z - a.x);
    return s;
}

std::complex<double> hilbert_prime_raw_c(const std::vector<Atom>& atoms,
                                         std::complex<double> z) {
    std::complex<double> s{0.0, 0.0};
    for (const Atom& a : atoms) {
        const std::complex<double> d = z - a.x;
        s -= a.w / (d * d);
    }
    return s;
}

} // namespace detail

namespace {

constexpr double kDivergedSum = 1e12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// limit of H at the declared upper edge: +inf if an atom sits on the edge or
// the sum runs past 1e12, the finite sum otherwise
double h_at_upper_edge(const AtomicMeasure& mu) {
    const double edge = mu.lambda_max();
    if (edge == mu.max_atom()) return kInf;
    double s = 0.0;
    for (const Atom& a : mu.atoms()) {
        s += a.w / (edge - a.x);
        if (s > kDivergedSum) return kInf;
    }
    return s;
}

double h_at_lower_edge(const AtomicMeasure& mu) {
    const double edge = mu.lambda_min();
    if (edge == mu.min_atom()) return -kInf;
    double s = 0.0;
    for (const Atom& a : mu.atoms()) {
        s += a.w / (edge - a.x);
        if (s < -kDivergedSum) return -kInf;
    }
    return s;
}

} // namespace

TransformDomain domain(const AtomicMeasure& mu) {
    TransformDomain d;
    d.lambda_min = mu.lambda_min();
    d.lambda_max = mu.lambda_max();
    d.h_min = h_at_lower_edge(mu);
    d.h_max = h_at_upper_edge(mu);
    d.alpha_min = std::isinf(d.h_min) ? d.lambda_min : d.lambda_min - 1.0 / d.h_min;
    d.alpha_max = std::isinf(d.h_max) ? d.lambda_max : d.lambda_max - 1.0 / d.h_max;
    d.mean = mu.mean();
    return d;
}

double hilbert(const AtomicMeasure& mu, double z) {
    if (z >= mu.lambda_min() && z <= mu.lambda_max())
        throw DomainError("hilbert: z inside the declared support");
    return detail::hilbert_raw(mu.atoms(), z);
}

double hilbert_prime(const AtomicMeasure& mu, double z) {
    if (z >= mu.lambda_min() && z <= mu.lambda_max())
        throw DomainError("hilbert_prime: z inside the declared support");
    return detail::hilbert_prime_raw(mu.atoms(), z);
}

double k_transform(const AtomicMeasure& mu, double gamma, const ToleranceConfig& tol) {
    if (gamma == 0.0)
        throw DomainError("k_transform: gamma = 0 (pole of K)");
    const TransformDomain d = domain(mu);
    const auto& atoms = mu.atoms();
    const double resid_tol = tol.root_abs_tol * std::max(1.0, std::abs(gamma));
    const double spread = (d.lambda_max - d.lambda_min) + 1.0;

    // single atom: H(z) = 1/(z - x) inverts in closed form
    if (atoms.size() == 1) {
        if (gamma > 0.0 ? !(gamma <= d.h_max) : !(gamma >= d.h_min))
            throw DomainError("k_transform: gamma outside the branch interval");
        return atoms[0].x + 1.0 / gamma;
    }

    if (gamma > 0.0) {
        if (!(gamma <= d.h_max))
            throw DomainError("k_transform: gamma above the upper branch endpoint");
        // finite endpoint: K is the support edge there
        if (!std::isinf(d.h_max) && std::abs(d.h_max - gamma) <= resid_tol)
            return d.lambda_max;
        const double hi = d.lambda_max + 1.0 / gamma + spread;
        double delta = 1e-6 * spread;
        double lo = d.lambda_max + delta;
        while (detail::hilbert_raw(atoms, lo) <= gamma) {
            delta *= 0.0625;
            if (delta < 1e-300)
                throw ConvergenceError("k_transform: cannot balance bracket at upper edge");
            lo = d.lambda_max + delta;
        }
        auto f = [&](double z) { return detail::hilbert_raw(atoms, z) - gamma; };
        auto df = [&](double z) { return detail::hilbert_prime_raw(atoms, z); };
        const double coarse = 1e-3 * std::max(1.0, std::abs(lo) + std::abs(hi));
        return num::bracketed_root(f, df, lo, hi, resid_tol, coarse, 300).x;
    }

    if (!(gamma >= d.h_min))
        throw DomainError("k_transform: gamma below the lower branch endpoint");
    if (!std::isinf(d.h_min) && std::abs(d.h_min - gamma) <= resid_tol)
        return d.lambda_min;
    const double lo = d.lambda_min - 1.0 / std::abs(gamma) - spread;
    double delta = 1e-6 * spread;
    double hi = d.lambda_min - delta;
    while (detail::hilbert_raw(atoms, hi) >= gamma) {
        delta *= 0.0625;
        if (delta < 1e-300)
            throw ConvergenceError("k_transform: cannot balance bracket at lower edge");
        hi = d.lambda_min - delta;
    }
    auto f = [&](double z) { return detail::hilbert_raw(atoms, z) - gamma; };
    auto df = [&](double z) { return detail::hilbert_prime_raw(atoms, z); };
    const double coarse = 1e-3 * std::max(1.0, std::abs(lo) + std::abs(hi));
    return num::bracketed_root(f, df, lo, hi, resid_tol, coarse, 300).x;
}

double r_transform(const AtomicMeasure& mu, double gamma, const ToleranceConfig& tol) {
    const auto& atoms = mu.atoms();
    if (atoms.size() == 1) return atoms[0].x; // constant shift for a point mass
    if (gamma == 0.0) return mu.mean();
    const TransformDomain d = domain(mu);
    if (gamma > 0.0 ? !(gamma <= d.h_max) : !(gamma >= d.h_min))
        throw DomainError("r_transform: gamma outside the branch interval");
    if (gamma == d.h_max) return d.alpha_max;
    if (gamma == d.h_min) return d.alpha_min;

    const double mean = mu.mean();
    const double range = mu.max_atom() - mu.min_atom();

    // Tiny gamma: a direct solve cannot beat the rounding floor eps/|gamma|,
    // so switch to the convergent expansion around zero (coefficients are the
    // central moments up to third order); truncation error is O(gamma^3).
    if (std::abs(gamma) <= 1e-4 / std::max(1.0, range)) {
        double m3 = 0.0;
        for (const Atom& a : atoms) {
            const double c = a.x - mean;
            m3 += a.w * c * c * c;
        }
        return mean + gamma * (mu.variance() + gamma * m3);
    }

    // Solve the dimensionless fixed-point form sum_i w_i/(1 + gamma (s - x_i)) = 1
    // for s directly.  Writing the root as K - 1/gamma and solving for K instead
    // loses all absolute accuracy for small |gamma| (the residual tolerance on
    // H(K) - gamma translates to an O(tol/gamma^2) error in K).
    auto phi = [&](double s) {
        double acc = 0.0;
        for (const Atom& a : atoms) acc += a.w / (1.0 + gamma * (s - a.x));
        return acc - 1.0;
    };
    auto dphi = [&](double s) {
        double acc = 0.0;
        for (const Atom& a : atoms) {
            const double den = 1.0 + gamma * (s - a.x);
            acc += a.w / (den * den);
        }
        return -gamma * acc;
    };

    // The root lies strictly between the measure's mean and the atom nearest the
    // active pole of the denominator; bracket between that pole offset and the
    // far atom, nudging off the pole just enough to force a sign change.
    double lo;
    double hi;
    if (gamma > 0.0) {
        const double barrier = mu.max_atom() - 1.0 / gamma;
        const double wmax = atoms.back().w;
        const double delta = std::min(0.5 * (mu.max_atom() - barrier), wmax / (2.0 * gamma));
        lo = barrier + delta; // phi(lo) >= wmax/(gamma*delta) - 1 >= 1 > 0
        hi = mu.max_atom();   // phi(hi) <= 0: every denominator is >= 1 there
    } else {
        const double barrier = mu.min_atom() - 1.0 / gamma;
        const double wmin = atoms.front().w;
        const double delta = std::min(0.5 * (barrier - mu.min_atom()), wmin / (-2.0 * gamma));
        lo = mu.min_atom();
        hi = barrier - delta;
    }
    // phi is O(1)-scaled but flattens like |gamma| near the root; scale the
    // stopping tolerance accordingly, with a floor at the summation noise.
    const double noise_floor = (4.0 + static_cast<double>(atoms.size())) * 1.1e-16;
    const double phi_tol =
        std::max(tol.root_abs_tol * std::abs(gamma) * std::max(1.0, range), noise_floor);
    const double coarse = 1e-3 * std::max(1.0, hi - lo);
    return num::bracketed_root(phi, dphi, lo, hi, phi_tol, coarse, tol.newton_max_iter).x;
}

double q_transform(const AtomicMeasure& mu, double alpha, const ToleranceConfig& tol) {
    const TransformDomain d = domain(mu);
    if (!(alpha > d.alpha_min && alpha < d.alpha_max))
        throw DomainError("q_transform: alpha outside (alpha_min, alpha_max)");
    if (alpha == d.mean) return 0.0;

    const double resid_tol = 1e-10 * std::max(1.0, std::abs(alpha));
    auto f = [&](double g) { return r_transform(mu, g, tol) - alpha; };

    double g_lo, g_hi;
    if (alpha > d.mean) {
        // R increases from mean at 0+ to alpha_max at h_max
        g_hi = std::isinf(d.h_max) ? 1.0 : d.h_max;
        if (std::isinf(d.h_max)) {
            while (f(g_hi) < 0.0) {
                g_hi *= 2.0;
                if (g_hi > 1e15)
                    throw ConvergenceError("q_transform: upper expansion failed");
            }
        }
        g_lo = std::min(1e-3, 0.5 * g_hi);
        while (f(g_lo) > 0.0) {
            g_lo *= 0.125;
            if (g_lo < 1e-300)
                throw ConvergenceError("q_transform: lower shrink failed");
        }
    } else {
        g_lo = std::isinf(d.h_min) ? -1.0 : d.h_min;
        if (std::isinf(d.h_min)) {
            while (f(g_lo) > 0.0) {
                g_lo *= 2.0;
                if (g_lo < -1e15)
                    throw ConvergenceError("q_transform: lower expansion failed");
            }
        }
        g_hi = std::max(-1e-3, 0.5 * g_lo);
        while (f(g_hi) < 0.0) {
            g_hi *= 0.125;
            if (g_hi > -1e-300)
                throw ConvergenceError("q_transform: upper shrink failed");
        }
    }
    const double coarse = 1e-4 * std::max(1.0, std::abs(g_lo) + std::abs(g_hi));
    return num::bracketed_root(f, nullptr, g_lo, g_hi, resid_tol, coarse, 400).x;
}

double complex_guard_radius(const AtomicMeasure& mu) {
    const double pad = 0.1 * (mu.lambda_max() - mu.lambda_min() + 1.0);
    const double below = std::abs(detail::hilbert_raw(mu.atoms(), mu.lambda_min() - pad));
    const double above = detail::hilbert_raw(mu.atoms(), mu.lambda_max() + pad);
    return 0.5 * std::min(below, above);
}

std::complex<double> r_transform_complex(const AtomicMeasure& mu, std::complex<double> w,
                                         const ToleranceConfig& tol) {
    using cd = std::complex<double>;
    const double r_guard = complex_guard_radius(mu);
    const double rw = std::abs(w);
    if (rw > r_guard)
        throw DomainError("r_transform_complex: |w| exceeds the guard radius");
    if (rw == 0.0) return {mu.mean(), 0.0};
    if (w.imag() == 0.0)
        return {r_transform(mu, w.real(), tol), 0.0};

    const auto& atoms = mu.atoms();
    // real seed on the side of Re w; a small positive seed when Re w = 0
    const double seed = (w.real() != 0.0) ? std::copysign(rw, w.real()) : 1e-2 * rw;
    cd z{k_transform(mu, seed, tol), 0.0};

    const double newton_tol = tol.root_abs_tol * std::max(1.0, rw);
    int budget = tol.newton_max_iter;
    const int segments = tol.path_segments;
    for (int k = 1; k <= segments; ++k) {
        const cd target = cd(seed, 0.0) + (w - cd(seed, 0.0)) *
                          (static_cast<double>(k) / segments);
        cd fz = detail::hilbert_raw_c(atoms, z) - target;
        while (std::abs(fz) > newton_tol) {
            if (budget-- <= 0)
                throw ConvergenceError("r_transform_complex: Newton budget exhausted on path");
            const cd dfz = detail::hilbert_prime_raw_c(atoms, z);
            if (dfz == cd(0.0, 0.0))
                throw ConvergenceError("r_transform_complex: vanishing derivative on path");
            z -= fz / dfz;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw ConvergenceError("r_transform_complex: path iterate diverged");
            fz = detail::hilbert_raw_c(atoms, z) - target;
        }
    }
    const double resid = std::abs(detail::hilbert_raw_c(atoms, z) - w);
    if (resid > 1e-11 * std::max(1.0, rw))
        throw ConvergenceError("r_transform_complex: final residual above tolerance");
    return z - 1.0 / w;
}

double v_n_solve(const Spectrum& e, double theta, int beta, const ToleranceConfig& tol) {
    if (beta != 1 && beta != 2)
        throw DomainError("v_n_solve: beta must be 1 or 2");
    if (theta == 0.0)
        throw DomainError("v_n_solve: theta = 0 has no tilt center");
    const AtomicMeasure emp = e.empirical();
    const double gamma = 2.0 * theta / beta;
    const double v = r_transform(emp, gamma, tol);
    // the defining residual: (beta/2theta) H(beta/2theta + v) = 1
    const double resid =
        std::abs(detail::hilbert_raw(emp.atoms(), 1.0 / gamma + v) - gamma);
    if (resid > 1e-12 * std::max(1.0, std::abs(gamma)) * 4.0)
        throw ConvergenceError("v_n_solve: residual above tolerance");
    return v;
}

std::vector<double> r_series(const AtomicMeasure& mu, int order) {
    if (order < 0 || order > 12)
        throw DomainError("r_series: order must lie in [0, 12]");
    const double m1 = mu.mean();
    const int top = order + 1; // highest cumulant index needed

    // centered moments; m[0] = 1
    std::vector<double> m(top + 1, 0.0);
    m[0] = 1.0;
    for (const Atom& a : mu.atoms()) {
        const double d = a.x - m1;
        double p = 1.0;
        for (int k = 1; k <= top; ++k) {
            p *= d;
            m[k] += a.w * p;
        }
    }

    // moment-cumulant recursion: m_n = sum_{s=1..n} kappa_s * [t^(n-s)] M(t)^s
    std::vector<double> kappa(top + 1, 0.0);
    std::vector<double> conv(top + 1, 0.0); // running M^(*s), truncated
    std::vector<double> next(top + 1, 0.0);
    std::vector<std::vector<double>> powers(top + 1);
    conv = m;
    powers[1] = conv;
    for (int s = 2; s <= top; ++s) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i <= top; ++i)
            for (int j = 0; i + j <= top; ++j)
                next[i + j] += conv[i] * m[j];
        conv = next;
        powers[s] = conv;
    }
    for (int n = 1; n <= top; ++n) {
        double acc = m[n];
        for (int s = 1; s < n; ++s)
            acc -= kappa[s] * powers[s][n - s];
        kappa[n] = acc; // powers[n][0] = 1
    }

    std::vector<double> c(order + 1);
    for (int k = 0; k <= order; ++k) c[k] = kappa[k + 1];
    c[0] += m1; // undo the centering shift: R_{mu}(g) = R_{centered}(g) + mean
    return c;
}

} // namespace spherint
