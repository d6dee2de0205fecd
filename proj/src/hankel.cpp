#include "aaklab/hankel.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "aaklab/quadrature.hpp"

namespace aaklab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

cplx HankelSystem::truncated_symbol(cplx z) const {
    cplx invz = 1.0 / z;
    cplx acc(0.0, 0.0);
    for (int k = N - 1; k >= 0; --k) acc = (acc + moments.m[k]) * invz;
    return acc;
}

HankelSystem build_hankel(const MomentSequence& mom) {
    if (mom.N < 2) throw ValidationError("hankel system needs N >= 2");
    HankelSystem sys;
    sys.N = mom.N;
    sys.moments = mom;
    sys.H = Eigen::MatrixXcd::Zero(mom.N, mom.N);
    for (int i = 0; i < mom.N; ++i)
        for (int j = 0; i + j < mom.N; ++j) sys.H(i, j) = mom.m[i + j];
    return sys;
}

std::vector<SingularTriple> singular_triples(const HankelSystem& sys, int upto) {
    if (upto >= sys.N) throw ValidationError("requested triple index beyond the truncation order");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(sys.H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD of the Hankel matrix failed");
    const auto& S = svd.singularValues();
    const double sigma0 = S(0);
    const double hnorm = sigma0;

    std::vector<SingularTriple> out;
    out.reserve(upto + 1);
    for (int n = 0; n <= upto; ++n) {
        SingularTriple t;
        t.n = n;
        t.sigma = S(n);
        t.v = svd.matrixV().col(n);
        t.u = svd.matrixU().col(n);
        // deterministic gauge: first above-threshold coefficient real positive
        double vmax = t.v.cwiseAbs().maxCoeff();
        for (int j = 0; j < t.v.size(); ++j) {
            if (std::abs(t.v(j)) > 1e-12 * vmax) {
                cplx phase = std::conj(t.v(j)) / std::abs(t.v(j));
                t.v *= phase;
                t.u *= phase;
                break;
            }
        }
        t.gap = (n + 1 < sys.N) ? S(n) - S(n + 1) : S(n);
        t.degenerate = t.gap < 1e-12 * sigma0;
        t.residual = (sys.H * t.v - t.sigma * t.u).norm();
        if (t.residual > 1e-10 * std::max(hnorm, 1e-300))
            throw NumericalError("SVD residual too large at index " + std::to_string(n));
        out.push_back(std::move(t));
    }
    return out;
}

BlaschkeSplit split_blaschke(const SingularTriple& t, double boundary_band) {
    Poly v = t.v_poly();
    if (effective_degree(v) < 0) throw ValidationError("singular vector is zero");
    std::vector<cplx> roots = poly_roots(v);
    BlaschkeSplit split;
    for (const cplx& r : roots) {
        double a = std::abs(r);
        if (a < 1.0 - boundary_band) {
            split.zeros_in_disk.push_back(r);
        } else if (a <= 1.0 + boundary_band) {
            split.boundary_zeros.push_back(r);
        }
    }
    std::sort(split.zeros_in_disk.begin(), split.zeros_in_disk.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    split.q = poly_from_roots(split.zeros_in_disk);
    split.q_tilde = reciprocal_conj(split.q);
    // w = (v / q) * q~; the quotient is recovered from circle samples, which
    // stays accurate where repeated synthetic division would amplify noise
    int quot_degree = effective_degree(v) - static_cast<int>(split.zeros_in_disk.size());
    Poly h = poly_divide_circle(v, split.q, quot_degree);
    split.w = poly_mul(h, split.q_tilde);
    return split;
}

Approximant aak_approximant(const HankelSystem& sys, const SingularTriple& t) {
    const int N = sys.N;
    Approximant g;
    g.n = t.n;
    g.method = "aak";
    g.sigma = t.sigma;
    g.denominator = t.v_poly();
    // P_+(F_N v): coefficient of z^l is sum_k m_k v_{l+k+1}
    g.numerator.assign(std::max(N - 1, 1), cplx(0.0, 0.0));
    for (int l = 0; l < N - 1; ++l) {
        cplx acc(0.0, 0.0);
        for (int k = 0; l + k + 1 < N; ++k) acc += sys.moments.m[k] * t.v(l + k + 1);
        g.numerator[l] = acc;
    }
    BlaschkeSplit split = split_blaschke(t);
    g.poles = split.zeros_in_disk;
    g.reducible = static_cast<int>(g.poles.size()) < t.n;
    if (static_cast<int>(g.poles.size()) > t.n)
        throw NumericalError("singular vector has more zeros in the disk than its index");
    return g;
}

CircleErrorStats circle_error(const HankelSystem& sys, const SingularTriple& t, int gridsize) {
    if (gridsize < 64) throw ValidationError("circle error grid must have at least 64 points");
    Eigen::VectorXcd d = sys.H * t.v;  // antianalytic coefficients of F_N v
    const Poly v = t.v_poly();
    CircleErrorStats stats;
    stats.samples.resize(gridsize);
    double sum = 0.0;
    for (int i = 0; i < gridsize; ++i) {
        double th = 2.0 * kPi * i / gridsize;
        cplx xi(std::cos(th), std::sin(th));
        cplx vv = poly_eval(v, xi);
        if (std::abs(vv) < 1e-12)
            throw NumericalError("denominator vanishes on the evaluation grid");
        cplx invxi = std::conj(xi);  // 1/xi on the unit circle
        cplx tail(0.0, 0.0);
        for (int k = sys.N - 1; k >= 0; --k) tail = (tail + d(k)) * invxi;
        double e = std::abs(tail / vv);
        stats.samples[i] = e;
        sum += e;
    }
    stats.max_err = *std::max_element(stats.samples.begin(), stats.samples.end());
    stats.min_err = *std::min_element(stats.samples.begin(), stats.samples.end());
    stats.mean_err = sum / gridsize;
    return stats;
}

namespace {

// Point-mass contribution of h = t^k num / den at a polar term:
// sum_l r_l h^{(l)}(eta) / l!, evaluated with jet arithmetic.
cplx polar_pairing(const PolarTerm& p, const Poly& num, const Poly& den, int k, bool absolute) {
    const int L = p.multiplicity();
    Jet tk = Jet::variable(p.eta(), L).pow(k);
    Jet h = tk.mul(Jet::of_poly(num, p.eta(), L)).mul(Jet::of_poly(den, p.eta(), L).reciprocal());
    cplx acc(0.0, 0.0);
    for (int l = 0; l < L; ++l) {
        cplx term = p.coeffs()[l] * h.c[l];
        acc += absolute ? cplx(std::abs(term), 0.0) : term;
    }
    return acc;
}

}  // namespace

cplx measure_pairing(const MeasureSpec& spec, const Poly& num, const Poly& den, int k,
                     double quad_tol) {
    cplx acc(0.0, 0.0);
    for (const IntervalTerm& iv : spec.intervals()) {
        acc += integrate_or_throw(
            [&](double t) {
                return std::pow(t, k) * poly_eval(num, cplx(t, 0.0)) /
                       poly_eval(den, cplx(t, 0.0)) * iv.density_at(t);
            },
            iv.a(), iv.b(), quad_tol);
    }
    for (const PolarTerm& p : spec.poles())
        acc += polar_pairing(p, num, den, k, /*absolute=*/false);
    return acc;
}

std::vector<cplx> orthogonality_residuals(const MeasureSpec& spec, const Poly& num,
                                          const Poly& den, int n, double quad_tol) {
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (int k = 0; k < n; ++k) out[k] = measure_pairing(spec, num, den, k, quad_tol);
    return out;
}

double orthogonality_scale(const MeasureSpec& spec, const Poly& num, const Poly& den,
                           double quad_tol) {
    double acc = 0.0;
    for (const IntervalTerm& iv : spec.intervals()) {
        acc += integrate_or_throw(
                   [&](double t) {
                       return cplx(std::abs(poly_eval(num, cplx(t, 0.0)) /
                                            poly_eval(den, cplx(t, 0.0)) * iv.density_at(t)),
                                   0.0);
                   },
                   iv.a(), iv.b(), quad_tol)
                   .real();
    }
    for (const PolarTerm& p : spec.poles())
        acc += polar_pairing(p, num, den, 0, /*absolute=*/true).real();
    return acc;
}

}  // namespace aaklab
