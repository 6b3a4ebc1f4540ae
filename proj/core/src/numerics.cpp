#include "spherint/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "spherint/errors.hpp"

namespace spherint::num {

RootResult bracketed_root(const std::function<double(double)>& f,
                          const std::function<double(double)>& df,
                          double lo, double hi,
                          double abs_tol, double coarse_width, int max_iter) {
    if (!(lo < hi))
        throw DomainError("bracketed_root: empty bracket");

    double flo = f(lo);
    double fhi = f(hi);
    int evals = 2;
    if (std::abs(flo) <= abs_tol) return {lo, flo, evals};
    if (std::abs(fhi) <= abs_tol) return {hi, fhi, evals};
    if ((flo > 0) == (fhi > 0))
        throw DomainError("bracketed_root: no sign change on bracket");

    // phase 1: plain bisection down to the coarse width
    while (hi - lo > coarse_width && evals < max_iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        ++evals;
        if (std::abs(fm) <= abs_tol) return {mid, fm, evals};
        if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; }
        else                       { hi = mid; fhi = fm; }
    }

    // phase 2: Newton (or secant) with the bracket as a safety net
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    ++evals;
    while (std::abs(fx) > abs_tol) {
        if (evals >= max_iter)
            throw ConvergenceError("bracketed_root: iteration budget exhausted");
        // maintain the bracket around the root
        if ((fx > 0) == (flo > 0)) { lo = x; flo = fx; }
        else                       { hi = x; fhi = fx; }

        double step_to = std::numeric_limits<double>::quiet_NaN();
        if (df) {
            const double d = df(x);
            if (d != 0.0) step_to = x - fx / d;
        } else {
            const double denom = fhi - flo;
            if (denom != 0.0) step_to = (lo * fhi - hi * flo) / denom;
        }
        if (!(step_to > lo && step_to < hi))
            step_to = 0.5 * (lo + hi); // fell outside: bisect instead
        x = step_to;
        fx = f(x);
        ++evals;
    }
    return {x, fx, evals};
}

namespace {

double simpson_rec(const std::function<double(double)>& f,
                   double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (depth >= max_depth)
        throw ConvergenceError("adaptive_simpson: refinement depth exhausted");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        throw DomainError("adaptive_simpson: non-finite integrand value");
    const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return sign * simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, 0, max_depth);
}

MaxResult concave_maximize(const std::function<double(double)>& f,
                           double a, double b, int iterations) {
    if (a > b) std::swap(a, b);
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return (f1 >= f2) ? MaxResult{x1, f1} : MaxResult{x2, f2};
}

ComplexRootResult complex_newton(
    const std::function<std::pair<std::complex<double>, std::complex<double>>(
        std::complex<double>)>& fdf,
    std::complex<double> z0, double abs_tol, int max_iter) {
    std::complex<double> z = z0;
    for (int it = 0; it < max_iter; ++it) {
        const auto [fz, dfz] = fdf(z);
        if (std::abs(fz) <= abs_tol)
            return {z, it};
        if (dfz == std::complex<double>(0.0, 0.0))
            throw ConvergenceError("complex_newton: vanishing derivative");
        z -= fz / dfz;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ConvergenceError("complex_newton: iterate diverged");
    }
    const auto [fz, dfz] = fdf(z);
    (void)dfz;
    if (std::abs(fz) <= abs_tol)
        return {z, max_iter};
    throw ConvergenceError("complex_newton: iteration budget exhausted");
}

EigenResult jacobi_eigen(std::vector<double> a, int n, double off_tol,
                         bool want_vectors) {
    if (n < 1 || static_cast<std::size_t>(n) * n != a.size())
        throw DomainError("jacobi_eigen: bad matrix dimensions");
    if (n > 1500)
        throw DomainError("jacobi_eigen: dimension cap (1500) exceeded");

    EigenResult out;
    if (n == 1) {
        out.values = {a[0]};
        if (want_vectors) out.vectors = {1.0};
        return out;
    }

    // rows of vt are the current eigenvector estimates (kept row-contiguous
    // so rotations touch two contiguous rows)
    std::vector<double> vt;
    if (want_vectors) {
        vt.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) vt[static_cast<std::size_t>(i) * n + i] = 1.0;
    }

    double fro2 = 0.0;
    for (double x : a) fro2 += x * x;
    const double fro = std::sqrt(fro2);
    if (fro == 0.0) { // zero matrix
        out.values.assign(n, 0.0);
        out.vectors = std::move(vt);
        return out;
    }
    const double off_target2 = (off_tol * fro) * (off_tol * fro);

    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off2 = 0.0;
        double sm = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double x = a[static_cast<std::size_t>(p) * n + q];
                off2 += 2.0 * x * x;
                sm += std::abs(x);
            }
        if (off2 <= off_target2) break;

        const double tresh = (sweep < 3) ? 0.2 * sm / (static_cast<double>(n) * n) : 0.0;

        for (int p = 0; p < n; ++p) {
            double* rowp = a.data() + static_cast<std::size_t>(p) * n;
            for (int q = p + 1; q < n; ++q) {
                double* rowq = a.data() + static_cast<std::size_t>(q) * n;
                const double apq = rowp[q];
                const double g = 100.0 * std::abs(apq);
                // past the early sweeps, zero out entries that are negligible
                // against both diagonal elements
                if (sweep > 4 &&
                    std::abs(rowp[p]) + g == std::abs(rowp[p]) &&
                    std::abs(rowq[q]) + g == std::abs(rowq[q])) {
                    rowp[q] = 0.0;
                    rowq[p] = 0.0;
                    continue;
                }
                if (std::abs(apq) <= tresh || apq == 0.0) continue;

                const double h = rowq[q] - rowp[p];
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double tapq = t * apq;

                rowp[p] -= tapq;
                rowq[q] += tapq;
                rowp[q] = 0.0;
                rowq[p] = 0.0;
                // rotate rows p and q (contiguous), then mirror into columns
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = rowp[r];
                    const double arq = rowq[r];
                    rowp[r] = arp - s * (arq + tau * arp);
                    rowq[r] = arq + s * (arp - tau * arq);
                }
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    a[static_cast<std::size_t>(r) * n + p] = rowp[r];
                    a[static_cast<std::size_t>(r) * n + q] = rowq[r];
                }
                if (want_vectors) {
                    double* vp = vt.data() + static_cast<std::size_t>(p) * n;
                    double* vq = vt.data() + static_cast<std::size_t>(q) * n;
                    for (int r = 0; r < n; ++r) {
                        const double up = vp[r];
                        const double uq = vq[r];
                        vp[r] = up - s * (uq + tau * up);
                        vq[r] = uq + s * (up - tau * uq);
                    }
                }
            }
        }
    }
    if (sweep >= max_sweeps)
        throw ConvergenceError("jacobi_eigen: sweep cap reached before convergence");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return a[static_cast<std::size_t>(i) * n + i] < a[static_cast<std::size_t>(j) * n + j];
    });
    out.values.resize(n);
    for (int i = 0; i < n; ++i)
        out.values[i] = a[static_cast<std::size_t>(order[i]) * n + order[i]];
    if (want_vectors) {
        out.vectors.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            std::copy_n(vt.data() + static_cast<std::size_t>(order[i]) * n, n,
                        out.vectors.data() + static_cast<std::size_t>(i) * n);
    }
    out.sweeps = sweep + 1;
    return out;
}

} // namespace spherint::num
