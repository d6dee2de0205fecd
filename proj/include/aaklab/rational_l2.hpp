#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "aaklab/measure.hpp"
#include "aaklab/poly.hpp"

namespace aaklab {

/// Uniform circle grid with trapezoid (= uniform) weights and cached values
/// of the approximated function. The discrete norm is exact for trigonometric
/// polynomials up to the grid order.
struct CircleGrid {
    std::vector<cplx> xi;
    std::vector<cplx> F;
    double weight = 0.0;  // 1/size

    double norm2(const std::vector<cplx>& residual) const;
    double f_norm() const;  // sqrt of the discrete squared norm of F
};

CircleGrid make_circle_grid(const MeasureSpec& spec, int size, double tol = 1e-12);

/// Recommended grid size: 8 * max(N, 4n).
int default_grid_size(int N, int n);

struct NumeratorFit {
    Poly p;                 // degree <= n-1
    double objective = 0.0; // concentrated squared L^2 error
    bool rank_deficient = false;
};

/// Linear least squares for the numerator given denominator zeros
/// (variable projection: the numerator subproblem is linear).
NumeratorFit project_numerator(const CircleGrid& grid, const std::vector<cplx>& zeros);

struct DenominatorPoint {
    std::vector<cplx> zeros;
    double objective = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    bool rank_flag = false;
    bool refined = false;  // polished on the orthogonality system
    int iterations = 0;
    Poly numerator;
    Poly denominator;
};

struct OptimOptions {
    int max_iterations = 500;
    double grad_tol = 1e-9;     // criticality threshold: converged when
                                // ||grad|| <= grad_tol * (1 + objective)
    double polish_tol = 1e-11;  // keep iterating toward this while progress holds,
                                // so the orthogonality certificates clear 1e-6
    double feas_margin = 1e-8;  // zeros projected back to |z| <= 1 - feas_margin
    std::ostream* trace = nullptr;
};

/// Quasi-Newton (BFGS) descent on the concentrated objective over the
/// denominator zeros, with analytic variable-projection gradient.
DenominatorPoint optimize_denominator(const CircleGrid& grid, int n, std::vector<cplx> init,
                                      const OptimOptions& opts = {});

/// AAK-pole initialization plus `extra_starts` seeded random perturbations;
/// returns the best converged local minimum found.
DenominatorPoint multistart_optimize(const CircleGrid& grid, int n, std::vector<cplx> init,
                                     std::uint64_t seed, int extra_starts = 4,
                                     const OptimOptions& opts = {});

/// Newton polish of an optimizer point on the orthogonality system
/// r_k = \int t^k q / q~^2 dl = 0, in denominator-coefficient coordinates
/// (the grid objective carries float noise at the scale of ||F||^2, which
/// caps the reachable gradient; the measure-side system does not). Falls
/// back to the input point when a step leaves the disk or stalls.
DenominatorPoint refine_critical_point(const MeasureSpec& spec, const CircleGrid& grid,
                                       const DenominatorPoint& point, int max_steps = 8);

/// |(F - g)(1/conj(xi_j))| and |d/dz (F - g)(1/conj(xi_j))| per zero; the
/// critical point interpolates F with order 2 at reflected poles.
std::vector<std::pair<double, double>> interpolation_residual(const MeasureSpec& spec,
                                                              const DenominatorPoint& point);

struct CriticalityCertificate {
    double orthogonality = 0.0;  // max |r_k| / scale
    double interpolation = 0.0;  // max reflected-point residual / ||F||_grid
    bool certified = false;      // both residuals at or below 1e-6
};

/// The two independent first-order certificates. Marks the point converged
/// when both vanish to tolerance, whether or not the gradient test fired
/// (the grid objective's float noise scales with ||F||^2 and can cap the
/// reachable gradient far above 1e-9).
CriticalityCertificate certify_critical(const MeasureSpec& spec, const CircleGrid& grid,
                                        DenominatorPoint& point);

/// Orthogonality residuals with unit outer factor (the p = 2 case).
std::vector<cplx> l2_orthogonality_residual(const MeasureSpec& spec, const DenominatorPoint& point);

}  // namespace aaklab
