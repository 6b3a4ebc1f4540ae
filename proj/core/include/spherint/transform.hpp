#pragma once

#include <complex>
#include <vector>

#include "spherint/measure.hpp"
#include "spherint/tolerance.hpp"

namespace spherint {

// Endpoint data of the Cauchy-transform branches outside the declared
// support.  h_max = lim_{z -> lambda_max+} H(z) is finite only when the mass
// stays strictly inside the declared upper edge (and the sum stays below
// 1e12); an atom at the edge forces +inf.  alpha_* = lambda_* - 1/h_* with
// the convention 1/inf = 0.
struct TransformDomain {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double h_min = 0.0;   // <= 0, possibly -inf
    double h_max = 0.0;   // >= 0, possibly +inf
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double mean = 0.0;
};

TransformDomain domain(const AtomicMeasure& mu);

// H(z) = sum w_i / (z - x_i) for z outside the declared support (closed
// interval excluded); DomainError otherwise.
double hilbert(const AtomicMeasure& mu, double z);
double hilbert_prime(const AtomicMeasure& mu, double z);

// Functional inverse of H on the branch outside the support:
// gamma in (h_min, h_max) \ {0}; gamma equal to a finite endpoint maps to the
// matching support edge.
double k_transform(const AtomicMeasure& mu, double gamma,
                   const ToleranceConfig& tol = default_tolerances());

// R(gamma) = K(gamma) - 1/gamma, continued by R(0) = mean.
double r_transform(const AtomicMeasure& mu, double gamma,
                   const ToleranceConfig& tol = default_tolerances());

// Inverse of R on (alpha_min, alpha_max); q_transform(mean) = 0.
double q_transform(const AtomicMeasure& mu, double alpha,
                   const ToleranceConfig& tol = default_tolerances());

// Largest |w| accepted by the complex continuation: half the smaller of the
// two |H| values one trimmed support-width outside the edges.
double complex_guard_radius(const AtomicMeasure& mu);

// Analytic continuation of R to complex w, |w| <= complex_guard_radius(mu):
// Newton on H(z) = w path-continued from a real seed.  Real w falls back to
// the real branch; w = 0 returns the mean.
std::complex<double> r_transform_complex(const AtomicMeasure& mu, std::complex<double> w,
                                         const ToleranceConfig& tol = default_tolerances());

// Tilt center of the finite-n integral representation: the v solving
// (beta/2theta) H_E(beta/2theta + v) = 1 on the empirical measure of e;
// equals R_emp(2 theta / beta) and lies within the eigenvalue range.
double v_n_solve(const Spectrum& e, double theta, int beta,
                 const ToleranceConfig& tol = default_tolerances());

// Coefficients (c_0..c_order) of the power series R(gamma) = sum c_k gamma^k,
// obtained by formal inversion of the moment expansion of H at infinity;
// c_0 = mean, c_1 = variance.  order <= 12.
std::vector<double> r_series(const AtomicMeasure& mu, int order);

namespace detail {
// Raw kernels without domain checks (also used by the asymptotic modules).
double hilbert_raw(const std::vector<Atom>& atoms, double z);
double hilbert_prime_raw(const std::vector<Atom>& atoms, double z);
std::complex<double> hilbert_raw_c(const std::vector<Atom>& atoms, std::complex<double> z);
std::complex<double> hilbert_prime_raw_c(const std::vector<Atom>& atoms, std::complex<double> z);
} // namespace detail

} // namespace spherint
