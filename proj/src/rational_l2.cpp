#include "aaklab/rational_l2.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "aaklab/hankel.hpp"

namespace aaklab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double CircleGrid::norm2(const std::vector<cplx>& residual) const {
    double acc = 0.0;
    for (const cplx& r : residual) acc += std::norm(r);
    return weight * acc;
}

double CircleGrid::f_norm() const {
    double acc = 0.0;
    for (const cplx& f : F) acc += std::norm(f);
    return std::sqrt(weight * acc);
}

CircleGrid make_circle_grid(const MeasureSpec& spec, int size, double tol) {
    CircleGrid g;
    g.xi.resize(size);
    g.F.resize(size);
    g.weight = 1.0 / size;
    for (int i = 0; i < size; ++i) {
        double th = 2.0 * kPi * i / size;
        g.xi[i] = cplx(std::cos(th), std::sin(th));
        g.F[i] = cauchy_transform(spec, g.xi[i], tol);
    }
    return g;
}

int default_grid_size(int N, int n) { return 8 * std::max(N, 4 * n); }

NumeratorFit project_numerator(const CircleGrid& grid, const std::vector<cplx>& zeros) {
    const int M = static_cast<int>(grid.xi.size());
    const int n = static_cast<int>(zeros.size());
    const Poly q = poly_from_roots(zeros);

    Eigen::MatrixXcd A(M, n);
    Eigen::VectorXcd y(M);
    for (int m = 0; m < M; ++m) {
        cplx invq = 1.0 / poly_eval(q, grid.xi[m]);
        cplx zj(1.0, 0.0);
        for (int j = 0; j < n; ++j) {
            A(m, j) = zj * invq;
            zj *= grid.xi[m];
        }
        y(m) = grid.F[m];
    }

    NumeratorFit fit;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    qr.setThreshold(1e-12);
    Eigen::VectorXcd c;
    if (qr.rank() < n) {
        // coalesced zeros: fall back to a ridge-regularized normal system
        fit.rank_deficient = true;
        Eigen::MatrixXcd G = A.adjoint() * A;
        G.diagonal().array() += 1e-14;
        c = G.ldlt().solve(A.adjoint() * y);
    } else {
        c = qr.solve(y);
    }
    fit.p.assign(c.data(), c.data() + n);
    Eigen::VectorXcd r = y - A * c;
    fit.objective = grid.weight * r.squaredNorm();
    return fit;
}

namespace {

std::vector<cplx> project_feasible(std::vector<cplx> zeros, double margin) {
    for (cplx& z : zeros) {
        double a = std::abs(z);
        if (a > 1.0 - margin) z *= (1.0 - margin) / a;
    }
    return zeros;
}

// Residual, gradient, and variable-projection Gauss-Newton data of the
// concentrated problem in the real parametrization. The derivative of the
// model holding the numerator fixed is d(p/q)/dxi_j = p / (q (z - xi_j));
// with the numerator at its least-squares optimum this gives the exact
// gradient, and projecting the derivative columns off the numerator span
// (Kaufman's reduced Jacobian) gives the correct curvature model.
struct VarPro {
    const CircleGrid& grid;
    int n;

    double eval(const std::vector<cplx>& zeros, Eigen::VectorXd* grad, Eigen::MatrixXd* JtJ,
                NumeratorFit* fit_out) const {
        const int M = static_cast<int>(grid.xi.size());
        const Poly q = poly_from_roots(zeros);

        Eigen::MatrixXcd A(M, n);
        Eigen::VectorXcd y(M), qvals(M);
        for (int m = 0; m < M; ++m) {
            cplx qz = poly_eval(q, grid.xi[m]);
            qvals(m) = qz;
            cplx invq = 1.0 / qz;
            cplx zj(1.0, 0.0);
            for (int j = 0; j < n; ++j) {
                A(m, j) = zj * invq;
                zj *= grid.xi[m];
            }
            y(m) = grid.F[m];
        }

        NumeratorFit fit;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
        qr.setThreshold(1e-12);
        Eigen::VectorXcd c;
        if (qr.rank() < n) {
            fit.rank_deficient = true;
            Eigen::MatrixXcd G = A.adjoint() * A;
            G.diagonal().array() += 1e-14;
            c = G.ldlt().solve(A.adjoint() * y);
        } else {
            c = qr.solve(y);
        }
        fit.p.assign(c.data(), c.data() + n);
        Eigen::VectorXcd r = y - A * c;
        fit.objective = grid.weight * r.squaredNorm();

        if (grad || JtJ) {
            Eigen::MatrixXcd D(M, n);
            for (int m = 0; m < M; ++m) {
                cplx pz = poly_eval(fit.p, grid.xi[m]);
                for (int j = 0; j < n; ++j)
                    D(m, j) = pz / (qvals(m) * (grid.xi[m] - zeros[j]));
            }
            if (grad) {
                Eigen::VectorXcd G = grid.weight * (D.adjoint() * r).conjugate();
                grad->resize(2 * n);
                for (int j = 0; j < n; ++j) {
                    (*grad)(2 * j) = -2.0 * G(j).real();
                    (*grad)(2 * j + 1) = 2.0 * G(j).imag();
                }
            }
            if (JtJ) {
                // project the columns off the numerator span
                Eigen::MatrixXcd Q =
                    qr.householderQ() * Eigen::MatrixXcd::Identity(M, qr.rank());
                Eigen::MatrixXcd Dt = D - Q * (Q.adjoint() * D);
                Eigen::MatrixXcd H = grid.weight * (Dt.adjoint() * Dt);
                JtJ->resize(2 * n, 2 * n);
                for (int j = 0; j < n; ++j) {
                    for (int l = 0; l < n; ++l) {
                        cplx h = H(j, l);
                        (*JtJ)(2 * j, 2 * l) = h.real();
                        (*JtJ)(2 * j, 2 * l + 1) = -h.imag();
                        (*JtJ)(2 * j + 1, 2 * l) = h.imag();
                        (*JtJ)(2 * j + 1, 2 * l + 1) = h.real();
                    }
                }
            }
        }
        if (fit_out) *fit_out = fit;
        return fit.objective;
    }
};

}  // namespace

DenominatorPoint optimize_denominator(const CircleGrid& grid, int n, std::vector<cplx> init,
                                      const OptimOptions& opts) {
    if (static_cast<int>(init.size()) != n)
        throw ValidationError("initial zero count does not match the requested degree");
    std::vector<cplx> zeros = project_feasible(std::move(init), opts.feas_margin);

    VarPro problem{grid, n};
    Eigen::VectorXd g(2 * n);
    Eigen::MatrixXd JtJ(2 * n, 2 * n);
    NumeratorFit fit;
    double f = problem.eval(zeros, &g, &JtJ, &fit);

    // Levenberg-Marquardt with Marquardt (diagonal) damping: JtJ is the
    // Gauss-Newton Hessian of f/2 and g = grad f = 2 J^T r.
    double lambda = 1e-3;
    int it = 0;
    int rejections = 0;
    for (; it < opts.max_iterations; ++it) {
        if (opts.trace) (*opts.trace) << it << ',' << f << ',' << g.norm() << '\n';
        if (g.norm() <= opts.polish_tol * (1.0 + f)) break;
        Eigen::MatrixXd A = JtJ;
        double dmax = std::max(JtJ.diagonal().maxCoeff(), 1e-300);
        for (int a = 0; a < 2 * n; ++a)
            A(a, a) += lambda * std::max(JtJ(a, a), 1e-10 * dmax);
        Eigen::VectorXd step = A.ldlt().solve(-0.5 * g);
        if (!step.allFinite()) break;
        std::vector<cplx> cand(n);
        for (int j = 0; j < n; ++j)
            cand[j] = zeros[j] + cplx(step(2 * j), step(2 * j + 1));
        cand = project_feasible(std::move(cand), opts.feas_margin);
        double fc = problem.eval(cand, nullptr, nullptr, nullptr);
        if (fc < f) {
            zeros = std::move(cand);
            f = problem.eval(zeros, &g, &JtJ, &fit);
            lambda = std::max(lambda * 0.3, 1e-12);
            rejections = 0;
        } else {
            lambda = std::min(lambda * 4.0, 1e10);
            if (++rejections > 30) break;  // descent below the evaluation noise
        }
    }

    DenominatorPoint best;
    best.zeros = zeros;
    best.objective = f;
    best.grad_norm = g.norm();
    best.numerator = fit.p;
    best.rank_flag = fit.rank_deficient;
    best.iterations = it;
    best.converged = g.norm() <= opts.grad_tol * (1.0 + f);
    best.denominator = poly_from_roots(best.zeros);
    // diagnostics sort: by real part, then imaginary part
    std::sort(best.zeros.begin(), best.zeros.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return best;
}

DenominatorPoint multistart_optimize(const CircleGrid& grid, int n, std::vector<cplx> init,
                                     std::uint64_t seed, int extra_starts,
                                     const OptimOptions& opts) {
    if (static_cast<int>(init.size()) < n) {
        // pad short initializations with seeded points in the disk
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> ur(-0.5, 0.5);
        while (static_cast<int>(init.size()) < n) init.emplace_back(ur(rng), ur(rng));
    }
    init.resize(n);

    DenominatorPoint best = optimize_denominator(grid, n, init, opts);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.02);
    for (int s = 0; s < extra_starts; ++s) {
        std::vector<cplx> perturbed = init;
        for (cplx& z : perturbed) z += cplx(gauss(rng), gauss(rng));
        DenominatorPoint cand = optimize_denominator(grid, n, perturbed, opts);
        bool better = (cand.converged && !best.converged) ||
                      (cand.converged == best.converged && cand.objective < best.objective);
        if (better) best = cand;
    }
    return best;
}

std::vector<std::pair<double, double>> interpolation_residual(const MeasureSpec& spec,
                                                              const DenominatorPoint& point) {
    std::vector<std::pair<double, double>> out;
    const Poly& p = point.numerator;
    const Poly q = poly_from_roots(point.zeros);
    auto err = [&](cplx z) {
        return cauchy_transform(spec, z) - poly_eval(p, z) / poly_eval(q, z);
    };
    for (const cplx& xi : point.zeros) {
        if (std::abs(xi) < 1e-8) {
            // reflection at infinity: the error vanishes there by construction
            out.emplace_back(0.0, 0.0);
            continue;
        }
        cplx zr = 1.0 / std::conj(xi);
        for (const PolarTerm& pt : spec.poles()) {
            if (std::abs(zr - pt.eta()) < 1e-10)
                throw NumericalError("reflected point collides with a pole of F");
        }
        cplx v = err(zr);
        // five-point central stencil for the derivative
        double h = 1e-4 * std::max(1.0, std::abs(zr));
        cplx d = (-err(zr + 2 * h) + 8.0 * err(zr + h) - 8.0 * err(zr - h) + err(zr - 2 * h)) /
                 (12.0 * h);
        out.emplace_back(std::abs(v), std::abs(d));
    }
    return out;
}

DenominatorPoint refine_critical_point(const MeasureSpec& spec, const CircleGrid& grid,
                                       const DenominatorPoint& point, int max_steps) {
    const int n = static_cast<int>(point.zeros.size());
    if (n == 0) return point;

    // work in monic denominator coefficients a_0..a_{n-1}; for real t
    //   q(t)  = t^n + sum_j a_j t^j
    //   q~(t) = 1 + sum_j conj(a_j) t^{n-j}
    auto q_of = [n](const Eigen::VectorXcd& a) {
        Poly q(n + 1);
        for (int j = 0; j < n; ++j) q[j] = a(j);
        q[n] = cplx(1.0, 0.0);
        return q;
    };
    auto residuals = [&](const Eigen::VectorXcd& a, Poly* q_out, Poly* qt_out) {
        Poly q = q_of(a);
        Poly qt = reciprocal_conj(q);
        if (q_out) *q_out = q;
        if (qt_out) *qt_out = qt;
        Poly qt2 = poly_mul(qt, qt);
        Eigen::VectorXcd r(n);
        for (int k = 0; k < n; ++k) r(k) = measure_pairing(spec, q, qt2, k);
        return r;
    };
    auto max_abs = [](const Eigen::VectorXcd& v) {
        double m = 0.0;
        for (int i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v(i)));
        return m;
    };

    Eigen::VectorXcd a(n);
    {
        Poly q0 = poly_from_roots(point.zeros);
        for (int j = 0; j < n; ++j) a(j) = q0[j];
    }
    Poly q, qt;
    Eigen::VectorXcd r = residuals(a, &q, &qt);
    double scale = orthogonality_scale(spec, q, poly_mul(qt, qt));
    if (!(scale > 0.0)) return point;
    double rnorm = max_abs(r);

    bool improved = false;
    for (int step = 0; step < max_steps && rnorm > 1e-12 * scale; ++step) {
        // Wirtinger Jacobian: dr_k/da_j = M1_{k+j}, dr_k/dconj(a_j) = -2 M2_{k+n-j}
        // with M1_s = \int t^s / q~^2 dl and M2_s = \int t^s q / q~^3 dl.
        Poly qt2 = poly_mul(qt, qt);
        Poly qt3 = poly_mul(qt2, qt);
        std::vector<cplx> M1(2 * n - 1), M2(2 * n);
        const Poly one{cplx(1.0, 0.0)};
        for (int s = 0; s < 2 * n - 1; ++s) M1[s] = measure_pairing(spec, one, qt2, s);
        for (int s = 0; s < 2 * n; ++s) M2[s] = measure_pairing(spec, q, qt3, s);
        Eigen::MatrixXcd A(n, n), B(n, n);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                A(k, j) = M1[k + j];
                B(k, j) = -2.0 * M2[k + n - j];
            }
        }
        // real 2n x 2n system for the increment delta with
        // dr = A delta + B conj(delta)
        Eigen::MatrixXd J(2 * n, 2 * n);
        Eigen::VectorXd rhs(2 * n);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                cplx apb = A(k, j) + B(k, j);
                cplx amb = A(k, j) - B(k, j);
                J(k, j) = apb.real();
                J(k, n + j) = -amb.imag();
                J(n + k, j) = apb.imag();
                J(n + k, n + j) = amb.real();
            }
            rhs(k) = -r(k).real();
            rhs(n + k) = -r(k).imag();
        }
        // column equilibration before the solve: the moment-matrix blocks are
        // badly scaled across coefficient orders
        Eigen::VectorXd colscale(2 * n);
        for (int j = 0; j < 2 * n; ++j) {
            double nrm = J.col(j).norm();
            colscale(j) = nrm > 1e-300 ? 1.0 / nrm : 1.0;
            J.col(j) *= colscale(j);
        }
        Eigen::VectorXd d = J.colPivHouseholderQr().solve(rhs);
        d.array() *= colscale.array();
        if (!d.allFinite()) break;

        bool accepted = false;
        double damp = 1.0;
        for (int half = 0; half < 8; ++half, damp *= 0.5) {
            Eigen::VectorXcd a_new = a;
            for (int j = 0; j < n; ++j) a_new(j) += damp * cplx(d(j), d(n + j));
            Poly q_new, qt_new;
            Eigen::VectorXcd r_new = residuals(a_new, &q_new, &qt_new);
            if (max_abs(r_new) < rnorm) {
                a = a_new;
                q = q_new;
                qt = qt_new;
                r = r_new;
                rnorm = max_abs(r_new);
                accepted = true;
                improved = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (!improved) return point;

    std::vector<cplx> zeros = poly_roots(q);
    if (static_cast<int>(zeros.size()) != n) return point;
    for (const cplx& z : zeros)
        if (!(std::abs(z) < 1.0)) return point;  // left the feasible set

    DenominatorPoint out = point;
    out.zeros = std::move(zeros);
    std::sort(out.zeros.begin(), out.zeros.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    NumeratorFit fit = project_numerator(grid, out.zeros);
    out.numerator = fit.p;
    out.objective = fit.objective;
    out.denominator = poly_from_roots(out.zeros);
    out.rank_flag = fit.rank_deficient;
    out.refined = true;
    return out;
}

std::vector<cplx> l2_orthogonality_residual(const MeasureSpec& spec, const DenominatorPoint& point) {
    const Poly q = poly_from_roots(point.zeros);
    const Poly q_tilde = reciprocal_conj(q);
    return orthogonality_residuals(spec, q, poly_mul(q_tilde, q_tilde),
                                   static_cast<int>(point.zeros.size()));
}

CriticalityCertificate certify_critical(const MeasureSpec& spec, const CircleGrid& grid,
                                        DenominatorPoint& point) {
    CriticalityCertificate cert;
    const Poly q = poly_from_roots(point.zeros);
    const Poly qt = reciprocal_conj(q);
    const Poly qt2 = poly_mul(qt, qt);
    double scale = orthogonality_scale(spec, q, qt2);
    double mx = 0.0;
    for (const cplx& r :
         orthogonality_residuals(spec, q, qt2, static_cast<int>(point.zeros.size())))
        mx = std::max(mx, std::abs(r));
    cert.orthogonality = scale > 0.0 ? mx / scale : mx;
    double fn = grid.f_norm();
    double interp = 0.0;
    for (const auto& [v, d] : interpolation_residual(spec, point)) interp = std::max(interp, v);
    cert.interpolation = fn > 0.0 ? interp / fn : interp;
    cert.certified = cert.orthogonality <= 1e-6 && cert.interpolation <= 1e-6;
    if (cert.certified) point.converged = true;
    return cert;
}

}  // namespace aaklab
