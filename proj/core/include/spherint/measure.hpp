#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace spherint {

struct Atom {
    double x;
    double w;
};

// Finitely supported probability measure: sorted atoms with positive weights
// summing to one, plus declared support edges [lambda_min, lambda_max].
//
// The declared edges default to the atom range but may be set strictly wider:
// they model the a-priori bounds within which the spectrum lives (extreme
// eigenvalues may approach an edge that carries no bulk mass).  All transform
// domain endpoints, saturation thresholds and rate-function pieces are taken
// relative to the declared edges; moments and distances depend only on atoms.
class AtomicMeasure {
public:
    static AtomicMeasure from_atoms(const std::vector<double>& positions,
                                    const std::vector<double>& weights);

    // builtins ------------------------------------------------------------
    static AtomicMeasure dirac(double x);
    // mass p at b, 1-p at a
    static AtomicMeasure bernoulli(double a, double b, double p = 0.5);
    // uniform law on [a,b], midpoint discretization on n cells; the declared
    // support is [a,b] itself
    static AtomicMeasure uniform_grid(double a, double b, int n);
    // unit-variance semicircle on [-2,2], midpoint discretization on n cells
    static AtomicMeasure semicircle_grid(int n);
    // atoms at +-s with equal weight, declared support [-edge, edge]; the
    // mass is pulled strictly inside the edges so the upper/lower transform
    // endpoints are finite
    static AtomicMeasure trimmed_bernoulli(double s = 0.5, double edge = 1.0);
    // semicircle scaled by `scale` < 1 with declared support kept at [-2,2]
    static AtomicMeasure trimmed_semicircle(int n, double scale = 0.8);

    // returns a copy with declared support [lo, hi] (must contain all atoms)
    AtomicMeasure with_support(double lo, double hi) const;

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool is_dirac() const { return atoms_.size() == 1; }

    double lambda_min() const { return support_lo_; } // declared lower edge
    double lambda_max() const { return support_hi_; } // declared upper edge
    double min_atom() const { return atoms_.front().x; }
    double max_atom() const { return atoms_.back().x; }
    std::pair<double, double> support() const { return {support_lo_, support_hi_}; }
    bool has_padded_support() const {
        return support_lo_ != min_atom() || support_hi_ != max_atom();
    }

    double moment(int k) const;
    double mean() const { return moment(1); }
    double variance() const;

private:
    AtomicMeasure() = default;
    std::vector<Atom> atoms_;
    double support_lo_ = 0.0;
    double support_hi_ = 0.0;
};

// Ordered eigenvalue list of an n x n matrix.
struct Spectrum {
    std::vector<double> eigenvalues; // ascending
    int n() const { return static_cast<int>(eigenvalues.size()); }
    double min() const { return eigenvalues.front(); }
    double max() const { return eigenvalues.back(); }
    // equal-weight atomic measure of the eigenvalues (duplicates merged)
    AtomicMeasure empirical() const;
};

// n-point quantile discretization: lambda_1 is the lower edge of the atom
// support and lambda_i the smallest position where the CDF reaches i/n.
// Kantorovich distance to mu is at most 2*max|atom|/n.
Spectrum quantile_discretize(const AtomicMeasure& mu, int n);

// L1 distance between the CDFs (equals the Kantorovich-Rubinstein distance
// for measures on the line).
double w1_distance(const AtomicMeasure& a, const AtomicMeasure& b);

} // namespace spherint
