#include "spherint/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spherint/errors.hpp"

namespace spherint {

namespace {

constexpr double kMergeRelTol = 1e-12;

bool positions_close(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= kMergeRelTol * scale;
}

} // namespace

AtomicMeasure AtomicMeasure::from_atoms(const std::vector<double>& positions,
                                        const std::vector<double>& weights) {
    if (positions.empty() || positions.size() != weights.size())
        throw DomainError("measure: need matching non-empty position/weight lists");

    std::vector<Atom> raw(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!std::isfinite(positions[i]))
            throw DomainError("measure: non-finite atom position");
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw DomainError("measure: atom weights must be positive and finite");
        raw[i] = {positions[i], weights[i]};
    }
    std::sort(raw.begin(), raw.end(),
              [](const Atom& a, const Atom& b) { return a.x < b.x; });

    AtomicMeasure m;
    m.atoms_.reserve(raw.size());
    for (const Atom& a : raw) {
        if (!m.atoms_.empty() && positions_close(m.atoms_.back().x, a.x))
            m.atoms_.back().w += a.w; // merge near-coincident positions
        else
            m.atoms_.push_back(a);
    }

    // compensated summation: plain accumulation drifts by ~n*eps, which a
    // fixed normalization check would reject for large grids
    double total = 0.0, comp = 0.0;
    for (const Atom& a : m.atoms_) {
        const double y = a.w - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw DomainError("measure: degenerate total weight");
    for (Atom& a : m.atoms_) a.w /= total;
    double check = 0.0, ccomp = 0.0;
    for (const Atom& a : m.atoms_) {
        const double y = a.w - ccomp;
        const double t = check + y;
        ccomp = (t - check) - y;
        check = t;
    }
    if (std::abs(check - 1.0) > 1e-12)
        throw DomainError("measure: weights failed to normalize within 1e-12");

    m.support_lo_ = m.atoms_.front().x;
    m.support_hi_ = m.atoms_.back().x;
    return m;
}

AtomicMeasure AtomicMeasure::dirac(double x) {
    return from_atoms({x}, {1.0});
}

AtomicMeasure AtomicMeasure::bernoulli(double a, double b, double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw DomainError("bernoulli: p must lie in (0,1)");
    if (a == b)
        throw DomainError("bernoulli: atoms coincide");
    return from_atoms({a, b}, {1.0 - p, p});
}

AtomicMeasure AtomicMeasure::uniform_grid(double a, double b, int n) {
    if (!(a < b) || n < 1)
        throw DomainError("uniform_grid: need a < b and n >= 1");
    std::vector<double> xs(n), ws(n, 1.0);
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) xs[i] = a + (i + 0.5) * h;
    return from_atoms(xs, ws).with_support(a, b);
}

AtomicMeasure AtomicMeasure::semicircle_grid(int n) {
    if (n < 2)
        throw DomainError("semicircle_grid: need n >= 2");
    std::vector<double> xs(n), ws(n);
    const double h = 4.0 / n;
    for (int i = 0; i < n; ++i) {
        const double x = -2.0 + (i + 0.5) * h;
        xs[i] = x;
        ws[i] = std::sqrt(4.0 - x * x); // common factor 1/(2 pi) drops in normalization
    }
    return from_atoms(xs, ws).with_support(-2.0, 2.0);
}

AtomicMeasure AtomicMeasure::trimmed_bernoulli(double s, double edge) {
    if (!(s > 0.0) || !(edge > s))
        throw DomainError("trimmed_bernoulli: need 0 < s < edge");
    return bernoulli(-s, s, 0.5).with_support(-edge, edge);
}

AtomicMeasure AtomicMeasure::trimmed_semicircle(int n, double scale) {
    if (!(scale > 0.0) || !(scale < 1.0))
        throw DomainError("trimmed_semicircle: scale must lie in (0,1)");
    AtomicMeasure base = semicircle_grid(n);
    std::vector<double> xs, ws;
    xs.reserve(base.size());
    ws.reserve(base.size());
    for (const Atom& a : base.atoms()) {
        xs.push_back(scale * a.x);
        ws.push_back(a.w);
    }
    return from_atoms(xs, ws).with_support(-2.0, 2.0);
}

AtomicMeasure AtomicMeasure::with_support(double lo, double hi) const {
    if (!(lo <= min_atom()) || !(hi >= max_atom()))
        throw DomainError("with_support: declared edges must contain all atoms");
    AtomicMeasure m = *this;
    m.support_lo_ = lo;
    m.support_hi_ = hi;
    return m;
}

double AtomicMeasure::moment(int k) const {
    if (k < 0) throw DomainError("moment: order must be >= 0");
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.w * std::pow(a.x, k);
    return s;
}

double AtomicMeasure::variance() const {
    const double m = mean();
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.w * (a.x - m) * (a.x - m);
    return s;
}

AtomicMeasure Spectrum::empirical() const {
    if (eigenvalues.empty())
        throw DomainError("spectrum: empty eigenvalue list");
    std::vector<double> ws(eigenvalues.size(), 1.0);
    return AtomicMeasure::from_atoms(eigenvalues, ws);
}

Spectrum quantile_discretize(const AtomicMeasure& mu, int n) {
    if (n < 1)
        throw DomainError("quantile_discretize: need n >= 1");
    const auto& atoms = mu.atoms();
    Spectrum s;
    s.eigenvalues.resize(n);
    s.eigenvalues[0] = mu.min_atom(); // lower support edge by construction
    std::size_t j = 0;
    double cdf = atoms[0].w;
    for (int i = 2; i <= n; ++i) {
        const double target = static_cast<double>(i) / n - 1e-13;
        while (cdf < target && j + 1 < atoms.size()) {
            ++j;
            cdf += atoms[j].w;
        }
        s.eigenvalues[i - 1] = atoms[j].x;
    }
    return s;
}

double w1_distance(const AtomicMeasure& a, const AtomicMeasure& b) {
    // walk the union of atom positions integrating |F_a - F_b|
    const auto& aa = a.atoms();
    const auto& bb = b.atoms();
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0, dist = 0.0;
    double prev = std::min(aa.front().x, bb.front().x);
    while (i < aa.size() || j < bb.size()) {
        double x;
        if (j >= bb.size() || (i < aa.size() && aa[i].x <= bb[j].x))
            x = aa[i].x;
        else
            x = bb[j].x;
        dist += std::abs(fa - fb) * (x - prev);
        while (i < aa.size() && aa[i].x == x) fa += aa[i++].w;
        while (j < bb.size() && bb[j].x == x) fb += bb[j++].w;
        prev = x;
    }
    return dist;
}

} // namespace spherint
