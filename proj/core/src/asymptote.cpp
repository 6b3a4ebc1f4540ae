#include "spherint/asymptote.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "spherint/errors.hpp"
#include "spherint/numerics.hpp"
#include "spherint/transform.hpp"

namespace spherint {

namespace {

void check_beta(int beta) {
    if (beta != 1 && beta != 2)
        throw DomainError("beta must be 1 or 2, got " + std::to_string(beta));
}

// theta*v - (beta/2) sum w_i log(1 + gamma (v - x_i)), gamma = 2 theta / beta.
double limit_value(const AtomicMeasure& mu, double theta, int beta, double gamma, double v) {
    double acc = 0.0;
    for (const Atom& a : mu.atoms()) {
        const double arg = gamma * (v - a.x);
        if (1.0 + arg <= 0.0)
            throw PrecisionError("rank-one limit: nonpositive log argument at atom x=" +
                                 std::to_string(a.x));
        acc += a.w * std::log1p(arg);
    }
    return theta * v - 0.5 * beta * acc;
}

} // namespace

const char* regime_name(Regime r) {
    switch (r) {
    case Regime::Zero: return "Zero";
    case Regime::Interior: return "Interior";
    case Regime::BoundaryMin: return "BoundaryMin";
    case Regime::BoundaryMax: return "BoundaryMax";
    case Regime::SaturatedMin: return "SaturatedMin";
    case Regime::SaturatedMax: return "SaturatedMax";
    }
    return "?";
}

AsymptoteResult rank_one_limit(const AtomicMeasure& mu, double theta, int beta,
                               const ToleranceConfig& tol) {
    check_beta(beta);
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");

    AsymptoteResult res;
    if (theta == 0.0) {
        // 0 is always strictly inside the branch interval; K has a pole there
        res.value = 0.0;
        res.v_theta = mu.mean();
        res.k_point = std::numeric_limits<double>::infinity();
        res.regime = Regime::Interior;
        return res;
    }

    const TransformDomain d = domain(mu);
    const double gamma = 2.0 * theta / beta;

    double v;
    if (gamma > d.h_max) {
        res.regime = Regime::SaturatedMax;
        v = d.lambda_max - 1.0 / gamma;
    } else if (gamma == d.h_max) {
        res.regime = Regime::BoundaryMax;
        v = d.alpha_max;
    } else if (gamma < d.h_min) {
        res.regime = Regime::SaturatedMin;
        v = d.lambda_min - 1.0 / gamma;
    } else if (gamma == d.h_min) {
        res.regime = Regime::BoundaryMin;
        v = d.alpha_min;
    } else {
        res.regime = Regime::Interior;
        v = r_transform(mu, gamma, tol);
    }

    res.v_theta = v;
    res.k_point = v + 1.0 / gamma;
    res.value = limit_value(mu, theta, beta, gamma, v);
    return res;
}

double small_theta_integral(const AtomicMeasure& mu, double theta, int beta,
                            const ToleranceConfig& tol) {
    check_beta(beta);
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    if (theta == 0.0) return 0.0;

    const TransformDomain d = domain(mu);
    const double gamma = 2.0 * theta / beta;
    if (!(gamma > d.h_min && gamma < d.h_max))
        throw DomainError("small_theta_integral: 2*theta/beta outside the open branch interval");

    const double mean = mu.mean();
    auto r_of = [&](double u) { return u == 0.0 ? mean : r_transform(mu, u, tol); };
    return 0.5 * beta * num::adaptive_simpson(r_of, 0.0, gamma, tol.quad_abs_tol);
}

double finite_n_leading_term(const Spectrum& e, double theta, int beta,
                             const ToleranceConfig& tol) {
    check_beta(beta);
    if (e.eigenvalues.empty()) throw DomainError("empty spectrum");
    if (theta == 0.0) return 0.0;

    const double gamma = 2.0 * theta / beta;
    const double v = v_n_solve(e, theta, beta, tol);
    double acc = 0.0;
    for (double lam : e.eigenvalues) {
        const double arg = gamma * (v - lam);
        if (1.0 + arg <= 0.0)
            throw PrecisionError("finite-n exponent: nonpositive log argument");
        acc += std::log1p(arg);
    }
    return theta * v - 0.5 * beta * acc / static_cast<double>(e.n());
}

PrefactorResult clt_prefactor(const AtomicMeasure& mu, double theta,
                              const ToleranceConfig& tol) {
    if (theta == 0.0) throw DomainError("clt_prefactor: theta must be nonzero");
    if (mu.atoms().size() == 1)
        throw DiracDegenerate("clt_prefactor: point mass has no fluctuation scale (limit is 1)");

    const TransformDomain d = domain(mu);
    const double gamma = 2.0 * theta; // beta = 1
    if (!(gamma > d.h_min && gamma < d.h_max))
        throw DomainError("clt_prefactor: 2*theta outside the open branch interval");

    const double k2 = k_transform(mu, gamma, tol);
    double z = 0.0;
    for (const Atom& a : mu.atoms()) {
        const double dk = k2 - a.x;
        z += a.w / (dk * dk);
    }
    // Cauchy-Schwarz: Z = Int (K-x)^-2 dmu > (Int (K-x)^-1 dmu)^2 = 4 theta^2
    // strictly, unless mu is a point mass.
    if (!(z > 4.0 * theta * theta))
        throw PrecisionError("clt_prefactor: variance integral not above 4*theta^2");

    PrefactorResult out;
    out.z_value = z;
    out.prefactor = 2.0 * std::fabs(theta) / std::sqrt(z);
    out.leading_exponent_per_n = rank_one_limit(mu, theta, 1, tol).value;
    return out;
}

std::complex<double> complex_rank_one_limit(const AtomicMeasure& mu,
                                            std::complex<double> theta,
                                            const ToleranceConfig& tol) {
    if (!std::isfinite(theta.real()) || !std::isfinite(theta.imag()))
        throw DomainError("theta must be finite");
    if (mu.atoms().size() == 1) return theta * mu.atoms()[0].x;
    if (theta == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};

    const std::complex<double> w = 2.0 * theta; // beta = 1
    const std::complex<double> v = r_transform_complex(mu, w, tol);

    std::complex<double> acc = 0.0;
    for (const Atom& a : mu.atoms()) {
        const std::complex<double> arg = 1.0 + w * (v - a.x);
        if (!(arg.real() > 0.0))
            throw DomainError("complex rank-one limit: log argument left the right half plane");
        acc += a.w * std::log(arg);
    }
    return theta * v - 0.5 * acc;
}

std::vector<double> taylor_coefficients(const AtomicMeasure& mu, int n_max,
                                        const ToleranceConfig& tol) {
    if (n_max < 0 || n_max > 8)
        throw DomainError("taylor_coefficients: order must be in [0, 8]");

    const double guard = complex_guard_radius(mu) / 2.0; // guard on |theta| = |w|/2
    const double rho = guard / 2.0;
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw DomainError("taylor_coefficients: degenerate guard radius");

    auto coeffs_at = [&](int m) {
        std::vector<double> re(static_cast<size_t>(n_max) + 1, 0.0);
        std::vector<double> im(static_cast<size_t>(n_max) + 1, 0.0);
        const double two_pi = 2.0 * std::acos(-1.0);
        for (int j = 0; j < m; ++j) {
            const double phi = two_pi * j / m;
            const std::complex<double> th = std::polar(rho, phi);
            const std::complex<double> f = complex_rank_one_limit(mu, th, tol);
            for (int n = 0; n <= n_max; ++n) {
                const std::complex<double> e = std::polar(1.0, -n * phi);
                const std::complex<double> term = f * e;
                re[static_cast<size_t>(n)] += term.real();
                im[static_cast<size_t>(n)] += term.imag();
            }
        }
        double rn = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            re[static_cast<size_t>(n)] /= m * rn;
            im[static_cast<size_t>(n)] /= m * rn;
            rn *= rho;
        }
        return std::pair{re, im};
    };

    // The contour sits at half the safe radius; when the true disc of
    // analyticity is barely larger, trapezoid aliasing decays slowly in the
    // node count, so double nodes until the coefficients stop moving.
    auto [re, im] = coeffs_at(64);
    bool stable = false;
    for (int m = 128; m <= 1024; m *= 2) {
        auto [re2, im2] = coeffs_at(m);
        bool ok = true;
        for (int n = 0; n <= n_max; ++n) {
            const double scale = std::max(1.0, std::fabs(re2[static_cast<size_t>(n)]));
            if (std::fabs(re2[static_cast<size_t>(n)] - re[static_cast<size_t>(n)]) >
                1e-9 * scale) {
                ok = false;
                break;
            }
        }
        re = std::move(re2);
        im = std::move(im2);
        if (ok) { stable = true; break; }
    }
    if (!stable)
        throw ConvergenceError("taylor_coefficients: contour sums did not stabilize");

    for (int n = 0; n <= n_max; ++n) {
        const double scale = std::max(1.0, std::fabs(re[static_cast<size_t>(n)]));
        if (std::fabs(im[static_cast<size_t>(n)]) > 1e-8 * scale)
            throw PrecisionError("taylor_coefficients: imaginary residue above tolerance");
    }
    return re;
}

double finite_rank_limit(const AtomicMeasure& mu, const std::vector<double>& thetas,
                         int beta, const ToleranceConfig& tol) {
    check_beta(beta);
    if (thetas.empty() || thetas.size() > 8)
        throw DomainError("finite_rank_limit: need between 1 and 8 thetas");

    double acc = 0.0;
    for (double th : thetas) {
        const AsymptoteResult r = rank_one_limit(mu, th, beta, tol);
        if (r.regime != Regime::Interior)
            throw DomainError(std::string("finite_rank_limit: theta=") + std::to_string(th) +
                              " is not interior (" + regime_name(r.regime) + ")");
        acc += r.value;
    }
    return acc / static_cast<double>(thetas.size());
}

} // namespace spherint
