#pragma once

#include <cstdint>
#include <vector>

#include "spherint/measure.hpp"
#include "spherint/rng.hpp"
#include "spherint/tolerance.hpp"

namespace spherint {

enum class McMethod { Direct, Tilted };

const char* mc_method_name(McMethod m);

struct McConfig {
    int n = 0;                 // expected matrix dimension; 0 = take it from the spectrum
    long long samples = 10000;
    std::uint64_t seed = 12345;
    int beta = 1;
    McMethod method = McMethod::Direct;
    int chunks = 1;            // independent RNG substreams, reduced in index order
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long long samples_used = 0;
    McMethod method = McMethod::Direct;
};

// k orthonormal columns of a Haar orthogonal matrix: modified Gram-Schmidt on
// i.i.d. standard Gaussian vectors.  Degenerate draws are redrawn.
std::vector<std::vector<double>> sample_haar_columns(int n, int k, NormalStream& rng);

// (1/N) log of the N-sample average of exp(N theta sum lambda_i s_i / sum s_i)
// with s_i squared standard normals (beta=1) or squared complex moduli
// (beta=2).  Direct averages the raw weights in the log domain and refuses
// exponent ranges beyond exp(600); Tilted draws each coordinate with variance
// (1 + (2 theta/beta)(v_n - lambda_i))^{-1} and reweights through the exact
// O(1) exponent identity, so the deterministic finite-n term factors out.
McEstimate mc_log_integral(const Spectrum& e, double theta, const McConfig& cfg,
                           const ToleranceConfig& tol = default_tolerances());

// Tilted estimate of the normalized integral e^{-n * finite_n_leading_term} I_n,
// whose large-n limit is the second-order constant from clt_prefactor (beta=1).
McEstimate mc_prefactor_ratio(const Spectrum& e, double theta, const McConfig& cfg,
                              const ToleranceConfig& tol = default_tolerances());

// Eigenvalues of diag(A) + V diag(B) V^T with V Haar orthogonal; trace is
// checked against sum(A) + sum(B).
Spectrum free_conv_spectrum(const Spectrum& a, const Spectrum& b, NormalStream& rng,
                            const ToleranceConfig& tol = default_tolerances());

struct AdditivityRow {
    double theta = 0.0;
    double sum_spectrum_limit = 0.0; // mean over draws of the limit on spec(A + V B V^T)
    double separate_sum = 0.0;       // limit(mu_a) + limit(mu_b)
    double gap = 0.0;                // |sum_spectrum_limit - separate_sum|
    double rep_stddev = 0.0;
    double r_sum_spectrum = 0.0;     // R of the pooled empirical measure at 2*theta
    double r_separate = 0.0;         // R_a(2 theta) + R_b(2 theta)
    double r_gap = 0.0;
    int excluded = 0;
};

struct AdditivityReport {
    int n = 0;
    int reps = 0;
    std::vector<AdditivityRow> rows;
};

// Checks that the rank-one limit of the randomized sum matches the sum of the
// individual limits, per theta, and that R of the pooled spectrum matches
// R_a + R_b.  Draws that throw on some theta are excluded and counted.
AdditivityReport additivity_experiment(const AtomicMeasure& mu_a, const AtomicMeasure& mu_b,
                                       int n, const std::vector<double>& thetas, int reps,
                                       std::uint64_t seed,
                                       const ToleranceConfig& tol = default_tolerances());

struct ConcentrationReport {
    int n = 0;
    int reps = 0;
    double theta = 0.0;
    double mean_value = 0.0;
    double variance = 0.0;         // across independent Haar draws
    double variance_times_n = 0.0; // expected O(1)
    int excluded = 0;
};

// Rep-to-rep variance of the limit functional on spec(A + V B V^T); the
// measure-concentration bound predicts variance decaying like 1/n.
ConcentrationReport concentration_experiment(const AtomicMeasure& mu_a,
                                             const AtomicMeasure& mu_b, int n, double theta,
                                             int reps, std::uint64_t seed,
                                             const ToleranceConfig& tol = default_tolerances());

// Rank-k estimator: exp(N sum_m theta_m S_m) averaged over Gram-Schmidt
// orthogonalized Gaussian columns, normalized by 1/(N*M).  Direct method only;
// with a single theta it reproduces mc_log_integral bit for bit.
McEstimate finite_rank_mc(const Spectrum& e, const std::vector<double>& thetas,
                          const McConfig& cfg,
                          const ToleranceConfig& tol = default_tolerances());

} // namespace spherint
