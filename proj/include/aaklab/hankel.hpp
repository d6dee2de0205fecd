#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "aaklab/measure.hpp"
#include "aaklab/poly.hpp"

namespace aaklab {

/// The finite Hankel matrix of the truncated symbol F_N = sum_{k<N} m_k z^{-k-1}:
/// H[i][j] = m_{i+j} when i+j <= N-1 and 0 otherwise. H is complex symmetric
/// and equals the Hankel operator of F_N exactly in the monomial bases.
struct HankelSystem {
    int N = 0;
    MomentSequence moments;
    Eigen::MatrixXcd H;

    /// F_N(z) = sum_{k<N} m_k z^{-k-1}, evaluated by Horner in 1/z.
    cplx truncated_symbol(cplx z) const;
};

HankelSystem build_hankel(const MomentSequence& mom);

struct SingularTriple {
    int n = 0;           // 0-based index into the nonincreasing singular values
    double sigma = 0.0;  // sigma_n
    Eigen::VectorXcd v;  // right singular vector (coefficients of a degree <= N-1 polynomial)
    Eigen::VectorXcd u;  // paired left vector, H v = sigma u
    double gap = 0.0;    // sigma_n - sigma_{n+1}
    bool degenerate = false;  // gap below 1e-12 * sigma_0: vector valid but not unique
    double residual = 0.0;    // ||H v - sigma u||_2

    Poly v_poly() const { return Poly(v.data(), v.data() + v.size()); }
};

/// First upto+1 singular triples of H, nonincreasing, with a deterministic
/// gauge: each right vector is normalized and rotated so its first
/// above-threshold coefficient is real positive.
std::vector<SingularTriple> singular_triples(const HankelSystem& sys, int upto);

/// Inner-outer data of a singular vector: zeros inside the disk carry the
/// Blaschke factor b = q/q~, and w = v/b is the (polynomial) outer part.
struct BlaschkeSplit {
    std::vector<cplx> zeros_in_disk;
    std::vector<cplx> boundary_zeros;  // within 1e-10 of |z| = 1, in/out ambiguous
    Poly q;        // monic, zeros = zeros_in_disk
    Poly q_tilde;  // reciprocal polynomial of q
    Poly w;        // outer remainder, zero-free in the closed disk

    cplx blaschke(cplx z) const { return poly_eval(q, z) / poly_eval(q_tilde, z); }
};

BlaschkeSplit split_blaschke(const SingularTriple& t, double boundary_band = 1e-10);

struct Approximant {
    int n = 0;
    std::string method;  // "aak" | "rational-l2"
    double sigma = 0.0;  // error level (L^inf for aak, L^2 for rational-l2)
    std::vector<cplx> poles;
    Poly numerator;
    Poly denominator;
    bool reducible = false;  // fewer than n poles found in the disk

    cplx eval(cplx z) const { return poly_eval(numerator, z) / poly_eval(denominator, z); }
};

/// g_n = P_+(F_N v_n) / v_n with poles at the in-disk zeros of v_n and
/// constant error modulus sigma_n on the circle.
Approximant aak_approximant(const HankelSystem& sys, const SingularTriple& t);

struct CircleErrorStats {
    std::vector<double> samples;
    double max_err = 0.0;
    double min_err = 0.0;
    double mean_err = 0.0;
};

/// |F_N - g_n| on the uniform circle grid, computed through the antianalytic
/// part P_-(F_N v_n) = (H v_n) so that no cancellation occurs.
CircleErrorStats circle_error(const HankelSystem& sys, const SingularTriple& t, int gridsize);

/// \int t^k num(t)/den(t) dl(t): interval quadrature plus the exact
/// point-mass derivative terms (jet arithmetic at each polar point).
cplx measure_pairing(const MeasureSpec& spec, const Poly& num, const Poly& den, int k,
                     double quad_tol = 1e-12);

/// Residuals of the orthogonality relations: integrals of
/// t^k num(t) / den(t) against the full measure, k = 0..n-1. The relations
/// pair q w / q~^2 with the measure; callers pass the cancellation-free
/// form: num = v, den = q~ for the singular-vector route
/// (q w / q~^2 = v / q~), num = q, den = q~^2 for the rational p = 2 route
/// (w = 1).
std::vector<cplx> orthogonality_residuals(const MeasureSpec& spec, const Poly& num,
                                          const Poly& den, int n, double quad_tol = 1e-12);

/// Normalizing scale: same integrand in absolute value.
double orthogonality_scale(const MeasureSpec& spec, const Poly& num, const Poly& den,
                           double quad_tol = 1e-10);

}  // namespace aaklab
