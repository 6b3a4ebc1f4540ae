#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "spherint/tolerance.hpp"

namespace spherint::num {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Root of f on [lo, hi]; f(lo) and f(hi) must have opposite signs (or one of
// them already meets the residual tolerance).  Bisection shrinks the bracket
// to coarse_width, then Newton (secant when df is empty) polishes, with every
// step re-bracketed so convergence is guaranteed.  abs_tol bounds |f(x)|.
RootResult bracketed_root(const std::function<double(double)>& f,
                          const std::function<double(double)>& df,
                          double lo, double hi,
                          double abs_tol,
                          double coarse_width,
                          int max_iter);

// Adaptive Simpson with |error| <= abs_tol on [a, b].  f must return finite
// values everywhere it is evaluated; for removable or integrable endpoint
// singularities the caller supplies a finite surrogate at the endpoint and
// refinement absorbs the rest.
double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double abs_tol,
                        int max_depth = 64);

struct MaxResult {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section maximizer on [a, b] with a fixed iteration count; intended
// for concave (unimodal) objectives.
MaxResult concave_maximize(const std::function<double(double)>& f,
                           double a, double b, int iterations);

struct ComplexRootResult {
    std::complex<double> z;
    int iterations = 0;
};

// Newton iteration for f(z) = 0 from z0; fdf returns {f(z), f'(z)}.
// Stops at |f| <= abs_tol; throws ConvergenceError past max_iter or on a
// vanishing derivative.
ComplexRootResult complex_newton(
    const std::function<std::pair<std::complex<double>, std::complex<double>>(
        std::complex<double>)>& fdf,
    std::complex<double> z0, double abs_tol, int max_iter);

struct EigenResult {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // row-major; row r is the eigenvector of values[r]
    int sweeps = 0;
};

// Cyclic Jacobi for a symmetric matrix (row-major, n x n).  Sweeps until the
// off-diagonal Frobenius norm drops below off_tol * ||A||_F.  With
// want_vectors=false the vectors member is left empty.
EigenResult jacobi_eigen(std::vector<double> a, int n,
                         double off_tol = default_tolerances().jacobi_off_tol,
                         bool want_vectors = true);

} // namespace spherint::num
