#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace aaklab {

using cplx = std::complex<double>;

/// Dense polynomial with ascending complex coefficients: p(z) = sum c[k] z^k.
using Poly = std::vector<cplx>;

cplx poly_eval(const Poly& p, cplx z);

/// (p(z), p'(z)) in one Horner pass.
std::pair<cplx, cplx> poly_eval_d(const Poly& p, cplx z);

Poly poly_mul(const Poly& a, const Poly& b);

Poly poly_derivative(const Poly& p);

/// Monic polynomial with the given zeros.
Poly poly_from_roots(const std::vector<cplx>& roots);

/// Synthetic division of p by (z - root); the (discarded) remainder is
/// p(root). Runs from the leading coefficient down, which is stable for
/// roots inside the unit disk.
Poly poly_deflate(const Poly& p, cplx root);

/// Reciprocal polynomial q~(z) = z^deg conj(q(1/conj(z))), i.e. coefficients
/// conjugated and reversed. `deg` defaults to q.size()-1.
Poly reciprocal_conj(const Poly& q, int deg = -1);

/// Effective degree: largest index with |c_k| > trim_tol * max|c|.
int effective_degree(const Poly& p, double trim_tol = 1e-13);

/// All roots of the trimmed polynomial via a balanced companion matrix,
/// each polished by one or two Newton steps on the full polynomial.
std::vector<cplx> poly_roots(const Poly& p, double trim_tol = 1e-13);

/// Zero count of f inside |z| < radius by the winding of the boundary
/// image over `grid` samples. Throws when the phase steps are too coarse
/// to resolve (f nearly vanishing on the circle).
int winding_number(const std::function<cplx(cplx)>& f, double radius, int grid = 8192);

/// Quotient v/q of exact degree quot_degree, recovered from unit-circle
/// samples by a direct DFT. Requires q zero-free on the circle; avoids the
/// noise amplification of running synthetic division many times.
Poly poly_divide_circle(const Poly& v, const Poly& q, int quot_degree);

/// Truncated Taylor arithmetic: c[0..len-1] are the derivatives/k! of a
/// function at a fixed point. Used for exact evaluation of the point-mass
/// parts of integrals against the measure.
struct Jet {
    std::vector<cplx> c;

    explicit Jet(int len) : c(len, cplx(0.0, 0.0)) {}
    int len() const { return static_cast<int>(c.size()); }

    static Jet constant(cplx v, int len);
    /// Jet of the identity t at the point eta.
    static Jet variable(cplx eta, int len);
    /// Jet of a polynomial at eta (Taylor shift by repeated synthetic division).
    static Jet of_poly(const Poly& p, cplx eta, int len);

    Jet mul(const Jet& o) const;
    Jet reciprocal() const;  // requires c[0] != 0
    Jet pow(int k) const;    // k >= 0
};

}  // namespace aaklab
