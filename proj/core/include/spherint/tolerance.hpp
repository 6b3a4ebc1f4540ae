#pragma once

namespace spherint {

// Numeric knobs shared across the library.  Every solver takes one of these
// (defaulted); the CLI exposes them via --tol KEY=VAL.
struct ToleranceConfig {
    double root_abs_tol   = 1e-12; // residual bound for scalar root finding
    double quad_abs_tol   = 1e-10; // absolute error target for quadrature
    int    newton_max_iter = 200;  // total Newton step budget (real and complex)
    double jacobi_off_tol = 1e-11; // off-diagonal Frobenius factor for eigensolver
    int    path_segments  = 32;    // homotopy segments for complex continuation
};

inline const ToleranceConfig& default_tolerances() {
    static const ToleranceConfig cfg{};
    return cfg;
}

} // namespace spherint
