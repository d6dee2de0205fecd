#pragma once

#include <complex>
#include <vector>

#include "aaklab/measure.hpp"

namespace aaklab {

struct Interval {
    double a = 0.0, b = 0.0;
    double length() const { return b - a; }
};

/// Green function of the unit disk: g(z,t) = log|1 - conj(t) z| - log|z - t|.
double green_disk(cplx z, cplx t);

/// Discretized Green equilibrium distribution on a union of intervals
/// relative to the unit disk. Internally the density is resolved per
/// interval as a Chebyshev series against the inverse-square-root endpoint
/// weight (the kernel integrals have closed forms on and off the support),
/// collocated so that the Green potential is constant on S. The panel table
/// is the serialized view: Chebyshev-graded breakpoints with the exact mass
/// of each panel divided by its length.
/// capacity = 1 / potential_constant is the condenser capacity of (S, T).
struct EquilibriumMeasure {
    struct Panel {
        double a = 0.0, b = 0.0;
        double density = 0.0;
        double length() const { return b - a; }
        double mid() const { return 0.5 * (a + b); }
        double mass() const { return density * (b - a); }
    };

    /// dmu = u(s)/sqrt(1-s^2) ds on t = mid + half*s, u = sum c_m T_m(s).
    /// lo/hi are the exact interval endpoints (mid/half round).
    struct Spectral {
        double lo = 0.0, hi = 0.0;
        double mid = 0.0, half = 0.0;
        std::vector<double> coeff;
    };

    std::vector<Interval> support;
    std::vector<Panel> panels;
    std::vector<Spectral> modes;
    double capacity = 0.0;
    double potential_constant = 0.0;

    double mass() const;
    /// CDF of the measure at x (closed form from the Chebyshev series).
    double cdf(double x) const;
    /// Density dmu/dt at a point of S (infinite at interval endpoints).
    double density_at(double t) const;
};

EquilibriumMeasure equilibrium_measure(const std::vector<Interval>& S, int M);

/// U_D^{mu}(z) for z in the disk; closed-form mode integrals, valid on S.
double green_potential(const EquilibriumMeasure& mu, cplx z);

/// Green energy of the measure (equals 1/capacity at the minimizer).
double green_energy(const EquilibriumMeasure& mu);

/// exp(-1/cap(S,T)), the predicted n-th root error rate.
double predicted_rate(const EquilibriumMeasure& mu);

/// Image of the support under the disk automorphism M_w(z) = (z-w)/(1-wz),
/// w real in (-1,1). Interval endpoints map monotonically.
std::vector<Interval> mobius_image(const std::vector<Interval>& S, double w);

std::vector<Interval> support_of(const MeasureSpec& spec);

/// Closed-form \int_alpha^beta log|z - t| dt for complex z (shared helper).
double int_log_abs(cplx z, double alpha, double beta);

}  // namespace aaklab
