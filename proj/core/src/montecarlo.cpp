#include "spherint/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "spherint/asymptote.hpp"
#include "spherint/errors.hpp"
#include "spherint/numerics.hpp"
#include "spherint/transform.hpp"

namespace spherint {

namespace {

// Streaming log-sum-exp moments: tracks max exponent m, sum of e^{x-m} and of
// e^{2(x-m)}.  Identical inputs stay exact (all shifted weights are 1.0).
struct LseAcc {
    double m = -std::numeric_limits<double>::infinity();
    double s1 = 0.0;
    double s2 = 0.0;
    long long count = 0;

    void add(double x) {
        if (x <= m) {
            const double w = std::exp(x - m);
            s1 += w;
            s2 += w * w;
        } else {
            const double r = std::isinf(m) ? 0.0 : std::exp(m - x);
            s1 = s1 * r + 1.0;
            s2 = s2 * (r * r) + 1.0;
            m = x;
        }
        ++count;
    }

    void merge(const LseAcc& o) {
        if (o.count == 0) return;
        if (count == 0) { *this = o; return; }
        if (o.m <= m) {
            const double r = std::exp(o.m - m);
            s1 += o.s1 * r;
            s2 += o.s2 * (r * r);
        } else {
            const double r = std::exp(m - o.m);
            s1 = s1 * r + o.s1;
            s2 = s2 * (r * r) + o.s2;
            m = o.m;
        }
        count += o.count;
    }

    // mean of e^{x-m} and its standard error, both in shifted units
    double mean_w() const { return s1 / static_cast<double>(count); }
    double se_w() const {
        if (count < 2) return 0.0;
        const double cnt = static_cast<double>(count);
        const double var = std::max(0.0, (s2 - s1 * s1 / cnt) / (cnt - 1.0));
        return std::sqrt(var / cnt);
    }
};

void validate_cfg(const Spectrum& e, const McConfig& cfg) {
    if (e.eigenvalues.empty()) throw DomainError("empty spectrum");
    if (e.n() < 2) throw DomainError("matrix dimension must be at least 2");
    if (cfg.n != 0 && cfg.n != e.n())
        throw DomainError("config dimension does not match the spectrum");
    if (cfg.samples < 1) throw DomainError("samples must be at least 1");
    if (cfg.chunks < 1) throw DomainError("chunks must be at least 1");
    if (cfg.beta != 1 && cfg.beta != 2) throw DomainError("beta must be 1 or 2");
}

long long chunk_share(long long samples, int chunks, int c) {
    return samples / chunks + (c < samples % chunks ? 1 : 0);
}

// One Direct sample of the rank-k functional: draws M Gaussian columns
// (interleaved re/im when beta=2), orthogonalizes them against each other,
// and returns nd * sum_m theta_m * (sum_i lambda_i s_i / sum_i s_i).
// With M=1 the column is untouched, which keeps the rank-one estimator's
// arithmetic byte-stable against this path.
double direct_exponent(const std::vector<double>& eigs, const std::vector<double>& thetas,
                       double nd, int beta, NormalStream& rng,
                       std::vector<std::vector<double>>& re,
                       std::vector<std::vector<double>>& im) {
    const int n = static_cast<int>(eigs.size());
    const int m_cols = static_cast<int>(thetas.size());

    for (int m = 0; m < m_cols; ++m) {
        for (int i = 0; i < n; ++i) {
            re[static_cast<size_t>(m)][static_cast<size_t>(i)] = rng.next();
            if (beta == 2) im[static_cast<size_t>(m)][static_cast<size_t>(i)] = rng.next();
        }
    }

    double acc = 0.0;
    std::vector<double> dens(static_cast<size_t>(m_cols), 0.0);
    for (int m = 0; m < m_cols; ++m) {
        auto& vr = re[static_cast<size_t>(m)];
        auto& vi = im[static_cast<size_t>(m)];
        for (int j = 0; j < m; ++j) {
            const auto& ur = re[static_cast<size_t>(j)];
            const auto& ui = im[static_cast<size_t>(j)];
            double dot_r = 0.0, dot_i = 0.0;
            for (int i = 0; i < n; ++i) {
                dot_r += ur[static_cast<size_t>(i)] * vr[static_cast<size_t>(i)];
                if (beta == 2) {
                    dot_r += ui[static_cast<size_t>(i)] * vi[static_cast<size_t>(i)];
                    dot_i += ur[static_cast<size_t>(i)] * vi[static_cast<size_t>(i)] -
                             ui[static_cast<size_t>(i)] * vr[static_cast<size_t>(i)];
                }
            }
            const double cr = dot_r / dens[static_cast<size_t>(j)];
            const double ci = dot_i / dens[static_cast<size_t>(j)];
            for (int i = 0; i < n; ++i) {
                vr[static_cast<size_t>(i)] -= cr * ur[static_cast<size_t>(i)];
                if (beta == 2) {
                    vr[static_cast<size_t>(i)] += ci * ui[static_cast<size_t>(i)];
                    vi[static_cast<size_t>(i)] -=
                        cr * ui[static_cast<size_t>(i)] + ci * ur[static_cast<size_t>(i)];
                }
            }
        }
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = vr[static_cast<size_t>(i)] * vr[static_cast<size_t>(i)];
            if (beta == 2) s += vi[static_cast<size_t>(i)] * vi[static_cast<size_t>(i)];
            num += eigs[static_cast<size_t>(i)] * s;
            den += s;
        }
        dens[static_cast<size_t>(m)] = den;
        acc += thetas[static_cast<size_t>(m)] * (num / den);
    }
    return nd * acc;
}

LseAcc run_direct(const Spectrum& e, const std::vector<double>& thetas, const McConfig& cfg) {
    const double nd = static_cast<double>(e.n());
    const int m_cols = static_cast<int>(thetas.size());
    const int n = e.n();

    LseAcc total;
    std::vector<std::vector<double>> re(static_cast<size_t>(m_cols),
                                        std::vector<double>(static_cast<size_t>(n), 0.0));
    std::vector<std::vector<double>> im;
    if (cfg.beta == 2)
        im.assign(static_cast<size_t>(m_cols), std::vector<double>(static_cast<size_t>(n), 0.0));
    else
        im.assign(static_cast<size_t>(m_cols), {});

    for (int c = 0; c < cfg.chunks; ++c) {
        const long long share = chunk_share(cfg.samples, cfg.chunks, c);
        NormalStream rng(cfg.seed, static_cast<std::uint64_t>(c));
        LseAcc acc;
        for (long long s = 0; s < share; ++s)
            acc.add(direct_exponent(e.eigenvalues, thetas, nd, cfg.beta, rng, re, im));
        total.merge(acc);
    }
    return total;
}

struct TiltedRun {
    LseAcc acc;
    double leading = 0.0; // deterministic finite-n exponent at v_n
};

TiltedRun run_tilted(const Spectrum& e, double theta, const McConfig& cfg,
                     const ToleranceConfig& tol) {
    const double nd = static_cast<double>(e.n());
    const int n = e.n();
    const double gamma = 2.0 * theta / cfg.beta;
    const double v = v_n_solve(e, theta, cfg.beta, tol);

    std::vector<double> sigma(static_cast<size_t>(n), 0.0);
    double leading_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double arg = 1.0 + gamma * (v - e.eigenvalues[static_cast<size_t>(i)]);
        if (!(arg > 0.0))
            throw PrecisionError("tilted sampler: nonpositive variance factor");
        sigma[static_cast<size_t>(i)] = 1.0 / std::sqrt(arg);
        leading_sum += std::log1p(gamma * (v - e.eigenvalues[static_cast<size_t>(i)]));
    }
    TiltedRun out;
    out.leading = theta * v - 0.5 * cfg.beta * leading_sum / nd;

    const double bn = cfg.beta * nd;
    for (int c = 0; c < cfg.chunks; ++c) {
        const long long share = chunk_share(cfg.samples, cfg.chunks, c);
        NormalStream rng(cfg.seed, static_cast<std::uint64_t>(c));
        LseAcc acc;
        for (long long s = 0; s < share; ++s) {
            double sum_s = 0.0, sum_ls = 0.0;
            for (int i = 0; i < n; ++i) {
                const double g = sigma[static_cast<size_t>(i)] * rng.next();
                double si = g * g;
                if (cfg.beta == 2) {
                    const double h = sigma[static_cast<size_t>(i)] * rng.next();
                    si += h * h;
                }
                sum_s += si;
                sum_ls += e.eigenvalues[static_cast<size_t>(i)] * si;
            }
            const double gn = sum_s / bn - 1.0;       // centered normalized square sum
            const double gh = sum_ls / bn - v;        // centered weighted counterpart
            const double x = nd * theta * (gn * (v * gn - gh)) / (1.0 + gn);
            acc.add(x);
        }
        out.acc.merge(acc);
    }
    return out;
}

} // namespace

const char* mc_method_name(McMethod m) {
    return m == McMethod::Direct ? "direct" : "tilted";
}

std::vector<std::vector<double>> sample_haar_columns(int n, int k, NormalStream& rng) {
    if (n < 1 || k < 1 || k > n)
        throw DomainError("sample_haar_columns: need 1 <= k <= n");

    std::vector<std::vector<double>> cols(static_cast<size_t>(k),
                                          std::vector<double>(static_cast<size_t>(n), 0.0));
    for (int m = 0; m < k; ++m) {
        auto& v = cols[static_cast<size_t>(m)];
        int attempts = 0;
        for (;;) {
            if (++attempts > 100)
                throw ConvergenceError("sample_haar_columns: repeated degenerate draws");
            for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = rng.next();
            for (int j = 0; j < m; ++j) {
                const auto& u = cols[static_cast<size_t>(j)];
                double dot = 0.0;
                for (int i = 0; i < n; ++i)
                    dot += u[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
                for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] -= dot * u[static_cast<size_t>(i)];
            }
            double norm2 = 0.0;
            for (int i = 0; i < n; ++i)
                norm2 += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
            if (norm2 > 1e-20 * std::max(1.0, static_cast<double>(n))) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] *= inv;
                break;
            }
        }
    }
    return cols;
}

McEstimate mc_log_integral(const Spectrum& e, double theta, const McConfig& cfg,
                           const ToleranceConfig& tol) {
    validate_cfg(e, cfg);
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");

    const double nd = static_cast<double>(e.n());
    McEstimate out;
    out.method = cfg.method;

    if (cfg.method == McMethod::Direct) {
        if (std::fabs(theta) * nd * (e.max() - e.min()) > 600.0)
            throw DomainError("mc_log_integral: direct-method exponent range beyond exp(600); "
                              "use the tilted method");
        const std::vector<double> thetas{theta};
        const LseAcc acc = run_direct(e, thetas, cfg);
        out.value = (acc.m + std::log(acc.s1 / static_cast<double>(acc.count))) / nd;
        out.std_error = acc.se_w() / acc.mean_w() / nd;
        out.samples_used = acc.count;
        return out;
    }

    const TiltedRun run = run_tilted(e, theta, cfg, tol);
    out.value = run.leading +
                (run.acc.m + std::log(run.acc.s1 / static_cast<double>(run.acc.count))) / nd;
    out.std_error = run.acc.se_w() / run.acc.mean_w() / nd;
    out.samples_used = run.acc.count;
    return out;
}

McEstimate mc_prefactor_ratio(const Spectrum& e, double theta, const McConfig& cfg,
                              const ToleranceConfig& tol) {
    validate_cfg(e, cfg);
    if (cfg.beta != 1)
        throw DomainError("mc_prefactor_ratio: beta must be 1");
    if (!std::isfinite(theta) || theta == 0.0)
        throw DomainError("mc_prefactor_ratio: theta must be finite and nonzero");

    const TiltedRun run = run_tilted(e, theta, cfg, tol);
    McEstimate out;
    out.method = McMethod::Tilted;
    out.value = std::exp(run.acc.m) * run.acc.mean_w();
    out.std_error = std::exp(run.acc.m) * run.acc.se_w();
    out.samples_used = run.acc.count;
    return out;
}

Spectrum free_conv_spectrum(const Spectrum& a, const Spectrum& b, NormalStream& rng,
                            const ToleranceConfig& tol) {
    const int n = a.n();
    if (n != b.n()) throw DomainError("free_conv_spectrum: dimension mismatch");
    if (n < 1 || n > 1500)
        throw DomainError("free_conv_spectrum: dimension outside [1, 1500]");

    const auto cols = sample_haar_columns(n, n, rng);

    std::vector<double> m(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        const auto& v = cols[static_cast<size_t>(k)];
        const double bk = b.eigenvalues[static_cast<size_t>(k)];
        for (int i = 0; i < n; ++i) {
            const double w = bk * v[static_cast<size_t>(i)];
            double* row = &m[static_cast<size_t>(i) * static_cast<size_t>(n)];
            for (int j = i; j < n; ++j) row[j] += w * v[static_cast<size_t>(j)];
        }
    }
    for (int i = 0; i < n; ++i) {
        m[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(i)] +=
            a.eigenvalues[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            m[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(i)] =
                m[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)];
    }

    auto eig = num::jacobi_eigen(std::move(m), n, tol.jacobi_off_tol, false);

    double trace = 0.0;
    for (int i = 0; i < n; ++i)
        trace += a.eigenvalues[static_cast<size_t>(i)] + b.eigenvalues[static_cast<size_t>(i)];
    double sum = 0.0;
    for (double x : eig.values) sum += x;
    if (std::fabs(sum - trace) > 1e-8 * n)
        throw PrecisionError("free_conv_spectrum: eigenvalue sum drifted from the trace");

    return Spectrum{std::move(eig.values)};
}

AdditivityReport additivity_experiment(const AtomicMeasure& mu_a, const AtomicMeasure& mu_b,
                                       int n, const std::vector<double>& thetas, int reps,
                                       std::uint64_t seed, const ToleranceConfig& tol) {
    if (n < 2 || n > 1500) throw DomainError("additivity_experiment: n outside [2, 1500]");
    if (reps < 1) throw DomainError("additivity_experiment: reps must be at least 1");
    if (thetas.empty()) throw DomainError("additivity_experiment: empty theta grid");

    const TransformDomain da = domain(mu_a);
    const TransformDomain db = domain(mu_b);
    for (double th : thetas) {
        const double g = 2.0 * th;
        if (!(g > da.h_min && g < da.h_max && g > db.h_min && g < db.h_max))
            throw DomainError("additivity_experiment: theta outside the interior regime of an input");
    }

    const Spectrum a = quantile_discretize(mu_a, n);
    const Spectrum b = quantile_discretize(mu_b, n);

    const size_t nt = thetas.size();
    std::vector<double> sum(nt, 0.0), sumsq(nt, 0.0);
    std::vector<int> used(nt, 0), excluded(nt, 0);
    std::vector<double> pooled;
    pooled.reserve(static_cast<size_t>(n) * static_cast<size_t>(reps));

    for (int r = 0; r < reps; ++r) {
        NormalStream rng(seed, static_cast<std::uint64_t>(r));
        const Spectrum s = free_conv_spectrum(a, b, rng, tol);
        pooled.insert(pooled.end(), s.eigenvalues.begin(), s.eigenvalues.end());
        const AtomicMeasure emp = s.empirical();
        for (size_t t = 0; t < nt; ++t) {
            try {
                const double v = rank_one_limit(emp, thetas[t], 1, tol).value;
                sum[t] += v;
                sumsq[t] += v * v;
                ++used[t];
            } catch (const SpherintError&) {
                ++excluded[t];
            }
        }
    }

    std::sort(pooled.begin(), pooled.end());
    const AtomicMeasure pooled_emp = Spectrum{std::move(pooled)}.empirical();

    AdditivityReport rep;
    rep.n = n;
    rep.reps = reps;
    rep.rows.reserve(nt);
    for (size_t t = 0; t < nt; ++t) {
        AdditivityRow row;
        row.theta = thetas[t];
        row.separate_sum = rank_one_limit(mu_a, thetas[t], 1, tol).value +
                           rank_one_limit(mu_b, thetas[t], 1, tol).value;
        if (used[t] > 0) {
            row.sum_spectrum_limit = sum[t] / used[t];
            if (used[t] > 1) {
                const double var =
                    std::max(0.0, (sumsq[t] - sum[t] * sum[t] / used[t]) / (used[t] - 1.0));
                row.rep_stddev = std::sqrt(var);
            }
        }
        row.gap = std::fabs(row.sum_spectrum_limit - row.separate_sum);
        const double g = 2.0 * thetas[t];
        row.r_sum_spectrum = r_transform(pooled_emp, g, tol);
        row.r_separate = r_transform(mu_a, g, tol) + r_transform(mu_b, g, tol);
        row.r_gap = std::fabs(row.r_sum_spectrum - row.r_separate);
        row.excluded = excluded[t];
        rep.rows.push_back(row);
    }
    return rep;
}

ConcentrationReport concentration_experiment(const AtomicMeasure& mu_a,
                                             const AtomicMeasure& mu_b, int n, double theta,
                                             int reps, std::uint64_t seed,
                                             const ToleranceConfig& tol) {
    AdditivityReport inner = additivity_experiment(mu_a, mu_b, n, {theta}, reps, seed, tol);
    // recompute per-rep values to get the spread (the row keeps only the stddev)
    ConcentrationReport out;
    out.n = n;
    out.reps = reps;
    out.theta = theta;
    out.excluded = inner.rows[0].excluded;
    out.mean_value = inner.rows[0].sum_spectrum_limit;
    const double sd = inner.rows[0].rep_stddev;
    out.variance = sd * sd;
    out.variance_times_n = out.variance * n;
    return out;
}

McEstimate finite_rank_mc(const Spectrum& e, const std::vector<double>& thetas,
                          const McConfig& cfg, const ToleranceConfig& tol) {
    (void)tol;
    validate_cfg(e, cfg);
    if (cfg.method != McMethod::Direct)
        throw DomainError("finite_rank_mc: only the direct method is supported");
    if (thetas.empty() || thetas.size() > 8)
        throw DomainError("finite_rank_mc: need between 1 and 8 thetas");
    double theta_sum = 0.0;
    for (double th : thetas) {
        if (!std::isfinite(th)) throw DomainError("finite_rank_mc: theta must be finite");
        theta_sum += std::fabs(th);
    }
    const double nd = static_cast<double>(e.n());
    if (theta_sum * nd * (e.max() - e.min()) > 600.0)
        throw DomainError("finite_rank_mc: exponent range beyond exp(600)");

    const LseAcc acc = run_direct(e, thetas, cfg);
    const double denom = nd * static_cast<double>(thetas.size());

    McEstimate out;
    out.method = McMethod::Direct;
    out.value = (acc.m + std::log(acc.s1 / static_cast<double>(acc.count))) / denom;
    out.std_error = acc.se_w() / acc.mean_w() / denom;
    out.samples_used = acc.count;
    return out;
}

} // namespace spherint
