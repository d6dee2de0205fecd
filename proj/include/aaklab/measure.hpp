#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aaklab/density.hpp"

#include "json.hpp"

namespace aaklab {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One interval [a,b] of the support together with its complex density.
/// Construction probes the density on a fine grid: every sample must be
/// finite and bounded away from zero (the measure class demands a local
/// lower bound on the total variation).
class IntervalTerm {
  public:
    IntervalTerm(double a, double b, DensityExpr density);
    IntervalTerm(double a, double b, const std::string& density_src)
        : IntervalTerm(a, b, DensityExpr::parse(density_src)) {}

    double a() const { return a_; }
    double b() const { return b_; }
    double length() const { return b_ - a_; }
    const DensityExpr& density() const { return density_; }
    cplx density_at(double t) const { return density_.eval(cplx(t, 0.0)); }
    double min_abs_density() const { return min_abs_; }

  private:
    double a_, b_;
    DensityExpr density_;
    double min_abs_;
};

/// A polar term sum_k coeffs[k] / (z - eta)^{k+1}; the multiplicity is
/// coeffs.size() and the top coefficient must be nonzero.
class PolarTerm {
  public:
    PolarTerm(cplx eta, std::vector<cplx> coeffs);

    cplx eta() const { return eta_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    int multiplicity() const { return static_cast<int>(coeffs_.size()); }
    cplx eval(cplx z) const;

  private:
    cplx eta_;
    std::vector<cplx> coeffs_;
};

/// The measure: a finite union of interval terms (sorted, disjoint) plus
/// polar terms at distinct points of the open unit disk. Immutable after
/// construction; all operations on it are pure.
class MeasureSpec {
  public:
    MeasureSpec(std::vector<IntervalTerm> intervals, std::vector<PolarTerm> poles);

    const std::vector<IntervalTerm>& intervals() const { return intervals_; }
    const std::vector<PolarTerm>& poles() const { return poles_; }

    /// max over interval endpoints and pole moduli (the geometric moment rate).
    double support_radius() const;
    /// max pole multiplicity minus one (polynomial factor in the moment bound).
    int polar_degree_excess() const;
    /// sum of integral |density| over intervals plus the polar coefficient part
    /// of the moment bound |m_k| <= C (1+k)^e rho^k.
    double moment_bound_constant(double quad_tol = 1e-10) const;

    /// Euclidean distance from z to the union of the support intervals.
    double distance_to_intervals(cplx z) const;
    /// Distance to the full support (intervals and polar points).
    double distance_to_support(cplx z) const;

    static MeasureSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

  private:
    std::vector<IntervalTerm> intervals_;
    std::vector<PolarTerm> poles_;
};

struct MomentSequence {
    int N = 0;
    std::vector<cplx> m;
    double rho = 0.0;       // decay rate from the measure geometry
    double decay_C = 0.0;   // constant in |m_k| <= C (1+k)^excess rho^k
    int excess = 0;

    bool satisfies_decay_bound(double slack = 1.0 + 1e-9) const;
};

/// F(z) = sum_j \int density_j(t)/(z-t) dt + sum_eta sum_k r_k/(z-eta)^{k+1}.
cplx cauchy_transform(const MeasureSpec& spec, cplx z, double tol = 1e-12);

/// Moments m_k = \int t^k dmu + exact polar part, k = 0..N-1, so that
/// F(z) = sum_k m_k z^{-k-1} for |z| > rho.
MomentSequence moments(const MeasureSpec& spec, int N, double tol = 1e-13);

/// Tail bound |F(z) - sum_{k<N} m_k z^{-k-1}| for |z| > rho.
double moment_tail_bound(const MomentSequence& mom, cplx z);

/// Total variation of the unwrapped density argument over all intervals;
/// +inf when grid refinement cannot resolve the winding.
double argument_variation(const MeasureSpec& spec);

/// Variation of the unwrapped argument of an arbitrary nonvanishing
/// complex function on [a,b] (shared by the diagnostics on outer factors).
double arg_variation_on_interval(const std::function<cplx(double)>& f, double a, double b,
                                 int base_grid = 4096, int max_refine = 4);

}  // namespace aaklab
