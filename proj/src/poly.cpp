#include "aaklab/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace aaklab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

cplx poly_eval(const Poly& p, cplx z) {
    cplx acc(0.0, 0.0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::pair<cplx, cplx> poly_eval_d(const Poly& p, cplx z) {
    cplx v(0.0, 0.0), d(0.0, 0.0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        d = d * z + v;
        v = v * z + *it;
    }
    return {v, d};
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return {cplx(0.0, 0.0)};
    Poly out(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) out[k - 1] = double(k) * p[k];
    return out;
}

Poly poly_from_roots(const std::vector<cplx>& roots) {
    Poly p{cplx(1.0, 0.0)};
    for (const cplx& r : roots) {
        Poly next(p.size() + 1, cplx(0.0, 0.0));
        for (std::size_t k = 0; k < p.size(); ++k) {
            next[k + 1] += p[k];
            next[k] -= r * p[k];
        }
        p = std::move(next);
    }
    return p;
}

Poly poly_deflate(const Poly& p, cplx root) {
    if (p.size() <= 1) throw std::invalid_argument("cannot deflate a constant");
    Poly q(p.size() - 1);
    cplx carry = p.back();
    for (std::size_t k = p.size() - 1; k-- > 0;) {
        q[k] = carry;
        carry = p[k] + root * carry;
    }
    return q;
}

Poly reciprocal_conj(const Poly& q, int deg) {
    int n = deg < 0 ? static_cast<int>(q.size()) - 1 : deg;
    Poly out(n + 1, cplx(0.0, 0.0));
    for (int k = 0; k <= n; ++k) {
        if (k < static_cast<int>(q.size())) out[n - k] = std::conj(q[k]);
    }
    return out;
}

int effective_degree(const Poly& p, double trim_tol) {
    double mx = 0.0;
    for (const cplx& c : p) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) return -1;
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k) {
        if (std::abs(p[k]) > trim_tol * mx) return k;
    }
    return -1;
}

namespace {

// Parlett-Reinsch style diagonal balancing with powers of two.
void balance(Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    bool changed = true;
    int sweeps = 0;
    while (changed && sweeps++ < 50) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            double rn = A.row(i).lpNorm<1>() - std::abs(A(i, i));
            double cn = A.col(i).lpNorm<1>() - std::abs(A(i, i));
            if (rn == 0.0 || cn == 0.0) continue;
            int expo = 0;
            std::frexp(rn / cn, &expo);
            expo /= 2;
            if (expo != 0) {
                double sc = std::ldexp(cn, expo);
                double sr = std::ldexp(rn, -expo);
                if (sc + sr < 0.9 * (cn + rn)) {
                    changed = true;
                    A.row(i) *= std::ldexp(1.0, -expo);
                    A.col(i) *= std::ldexp(1.0, expo);
                }
            }
        }
    }
}

}  // namespace

std::vector<cplx> poly_roots(const Poly& p, double trim_tol) {
    const int d = effective_degree(p, trim_tol);
    if (d < 1) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -p[i] / p[d];
    balance(C);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue iteration failed");
    std::vector<cplx> roots(d);
    for (int i = 0; i < d; ++i) {
        cplx z = es.eigenvalues()(i);
        for (int it = 0; it < 2; ++it) {
            auto [v, dv] = poly_eval_d(p, z);
            if (std::abs(dv) == 0.0) break;
            cplx step = v / dv;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(z))) break;  // polish only, never jump
            z -= step;
        }
        roots[i] = z;
    }
    return roots;
}

Poly poly_divide_circle(const Poly& v, const Poly& q, int quot_degree) {
    if (quot_degree < 0) return {cplx(0.0, 0.0)};
    const int M = 2 * (quot_degree + 1);
    std::vector<cplx> samples(M);
    for (int j = 0; j < M; ++j) {
        double th = 2.0 * kPi * j / M;
        cplx xi(std::cos(th), std::sin(th));
        cplx qv = poly_eval(q, xi);
        if (std::abs(qv) < 1e-300) throw std::runtime_error("division polynomial vanishes on the circle");
        samples[j] = poly_eval(v, xi) / qv;
    }
    Poly h(quot_degree + 1);
    for (int k = 0; k <= quot_degree; ++k) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < M; ++j) {
            long long idx = (static_cast<long long>(j) * k) % M;  // exact angle reduction
            double th = -2.0 * kPi * idx / M;
            acc += samples[j] * cplx(std::cos(th), std::sin(th));
        }
        h[k] = acc / double(M);
    }
    return h;
}

int winding_number(const std::function<cplx(cplx)>& f, double radius, int grid) {
    double total = 0.0;
    cplx prev = f(cplx(radius, 0.0));
    if (prev == cplx(0.0, 0.0)) throw std::runtime_error("winding number: zero on the contour");
    for (int i = 1; i <= grid; ++i) {
        double th = 2.0 * kPi * i / grid;
        cplx cur = f(radius * cplx(std::cos(th), std::sin(th)));
        double d = std::arg(cur / prev);
        if (std::abs(d) > 0.8 * kPi)
            throw std::runtime_error("winding number unresolved: phase step too large");
        total += d;
        prev = cur;
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

Jet Jet::constant(cplx v, int len) {
    Jet j(len);
    if (len > 0) j.c[0] = v;
    return j;
}

Jet Jet::variable(cplx eta, int len) {
    Jet j(len);
    if (len > 0) j.c[0] = eta;
    if (len > 1) j.c[1] = cplx(1.0, 0.0);
    return j;
}

Jet Jet::of_poly(const Poly& p, cplx eta, int len) {
    // Repeated synthetic division: remainders are the Taylor coefficients.
    Jet out(len);
    Poly work = p.empty() ? Poly{cplx(0.0, 0.0)} : p;
    for (int k = 0; k < len; ++k) {
        cplx rem(0.0, 0.0);
        for (auto it = work.rbegin(); it != work.rend(); ++it) rem = rem * eta + *it;
        out.c[k] = rem;
        if (work.size() <= 1) {
            break;  // higher coefficients are zero
        }
        Poly q(work.size() - 1);
        cplx carry = work.back();
        for (std::size_t j = work.size() - 1; j-- > 0;) {
            q[j] = carry;
            carry = work[j] + eta * carry;
        }
        work = std::move(q);
    }
    return out;
}

Jet Jet::mul(const Jet& o) const {
    Jet out(len());
    for (int i = 0; i < len(); ++i)
        for (int j = 0; i + j < len() && j < o.len(); ++j) out.c[i + j] += c[i] * o.c[j];
    return out;
}

Jet Jet::reciprocal() const {
    if (len() == 0 || c[0] == cplx(0.0, 0.0))
        throw std::domain_error("jet reciprocal of a vanishing leading term");
    Jet out(len());
    out.c[0] = 1.0 / c[0];
    for (int k = 1; k < len(); ++k) {
        cplx acc(0.0, 0.0);
        for (int j = 1; j <= k; ++j) acc += c[j] * out.c[k - j];
        out.c[k] = -acc / c[0];
    }
    return out;
}

Jet Jet::pow(int k) const {
    Jet out = Jet::constant(cplx(1.0, 0.0), len());
    Jet base = *this;
    while (k > 0) {
        if (k & 1) out = out.mul(base);
        base = base.mul(base);
        k >>= 1;
    }
    return out;
}

}  // namespace aaklab
