#pragma once

#include <optional>
#include <vector>

#include "aaklab/hankel.hpp"
#include "aaklab/measure.hpp"
#include "aaklab/potential.hpp"

namespace aaklab {

/// Angle in which the system of disjoint intervals is seen at xi:
/// sum_j |Arg(a_j - xi) - Arg(b_j - xi)| with the left-continuous convention
/// Arg(0) = pi. Equals pi on the intervals, tends to 0 far away.
double angle_seen(cplx xi, const std::vector<Interval>& intervals);

struct PoleDiagnostics {
    int n = 0;
    std::vector<cplx> poles;
    std::vector<cplx> near_support;
    std::vector<cplx> outliers;
    double ks_distance = 0.0;
    double max_imag_near = 0.0;  // largest |Im| among near-support poles
    bool empty_near = false;     // no pole within delta of S: distance forced to 1
    std::vector<double> angles;  // angle_seen per pole
};

/// Restrict poles to the delta-neighborhood of S, project to the real axis,
/// renormalize, and compare CDFs against mu_G on a grid of the convex hull.
PoleDiagnostics weak_star_distance(const std::vector<cplx>& poles, const EquilibriumMeasure& mu,
                                   double delta = 0.05, int cdf_grid = 1000);

struct RateRecord {
    int n = 0;
    double error = 0.0;
    double root_rate = 0.0;  // error^{1/(2n)}
    double predicted = 0.0;  // exp(-1/cap)
    bool excluded = false;   // underflow guard: error below 1e-14
};

struct RateTable {
    std::vector<RateRecord> records;
    double fitted_limit = 0.0;  // least-squares extrapolation of log root_rate vs 1/n
    double predicted = 0.0;
    int fit_count = 0;
};

RateTable rate_table(const std::vector<std::pair<int, double>>& errors_per_n, double capacity);

struct AttractionRecord {
    cplx eta;
    int multiplicity = 0;
    double radius = 0.0;
    std::vector<std::pair<int, int>> count_per_n;  // (n, poles within radius)
    bool lower_ok = false;  // count >= multiplicity for all n past a threshold
    double theta = 0.0;     // angle_seen at eta
};

/// Pole counts in disjoint balls around the polar singularities.
std::vector<AttractionRecord> attraction_audit(
    const std::vector<std::pair<int, std::vector<cplx>>>& poles_per_n, const MeasureSpec& spec,
    double radius = 0.15);

struct AngleBoundAudit {
    double lhs = 0.0;  // sum over poles of (pi - theta_S(pole))
    double rhs = 0.0;  // V(phi) + V(arg w_n on S) + sum m(eta) theta_S(eta) + (m+s-1) pi
    bool holds = false;
    double w_variation = 0.0;
    bool w_unresolved = false;
};

struct UpperAttractionAudit {
    double lhs = 0.0;  // sum over eta of (sup_n count - m(eta)) (pi - theta_S(eta))
    double rhs = 0.0;  // V(phi) + V_W + (m + 2 s' - 1) pi + 2 sum m(eta) theta_S(eta)
    double v_w = 0.0;  // sup over computed degrees of V(arg w_n, S)
    bool holds = false;
};

/// Upper counterpart of the attraction audit: excess poles caught by the
/// attraction balls are controlled by the total variation budget. v_w is
/// estimated from the computed outer factors (pass 0 for the p = 2 branch).
UpperAttractionAudit upper_attraction_audit(const std::vector<AttractionRecord>& records,
                                            const MeasureSpec& spec, double v_w);

/// The computable form of the pole-angle inequality; `w` is the outer factor
/// of the singular vector (pass {1} for the rational p = 2 branch).
AngleBoundAudit angle_bound_audit(const std::vector<cplx>& poles, const MeasureSpec& spec,
                                  const Poly& w);

struct FieldProbe {
    cplx z;
    double observed = 0.0;   // |F - g_n|^{1/2n}
    double predicted = 0.0;  // Green-potential prediction at z
    bool near_reflected_support = false;
};

/// Pointwise comparison of the error field against the potential-theoretic
/// prediction: interior probes use exp(U(z) - 1/cap), exterior probes use
/// exp(-1/cap - U(1/conj(z))).
std::vector<FieldProbe> capacity_convergence_field(const MeasureSpec& spec,
                                                   const Approximant& g,
                                                   const EquilibriumMeasure& mu,
                                                   const std::vector<cplx>& probes);

}  // namespace aaklab
