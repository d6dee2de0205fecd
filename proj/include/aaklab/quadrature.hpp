#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace aaklab {

using cplx = std::complex<double>;

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadResult {
    cplx value{0.0, 0.0};
    double err_est = 0.0;
    bool converged = true;
};

/// Gauss-Legendre nodes/weights on [-1,1], cached per order.
const std::vector<double>& gl_nodes(int order);
const std::vector<double>& gl_weights(int order);

/// Adaptive composite Gauss-Legendre on [a,b] with bisection. The error
/// estimate on a segment is |GL(segment) - GL(left half) - GL(right half)|;
/// segments split until the estimate beats their share of abs_tol.
QuadResult integrate(const std::function<cplx(double)>& f, double a, double b,
                     double abs_tol = 1e-12, int max_depth = 40);

/// Same, but throws QuadratureError when the tolerance was not reached.
cplx integrate_or_throw(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol = 1e-12);

}  // namespace aaklab
