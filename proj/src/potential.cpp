#include "aaklab/potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace aaklab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// antiderivative of log|x - t| in t, real x: (t-x)(log|t-x| - 1)
double F_real(double x, double t) {
    double u = t - x;
    if (u == 0.0) return 0.0;
    return u * (std::log(std::abs(u)) - 1.0);
}

// inverse Joukowski map: v with zeta = (v + 1/v)/2 and |v| <= 1
cplx inv_joukowski(cplx zeta) {
    cplx r = std::sqrt(zeta * zeta - 1.0);
    cplx v1 = zeta - r, v2 = zeta + r;
    return std::abs(v1) <= std::abs(v2) ? v1 : v2;
}

// \int_{-1}^{1} T_m(s)/sqrt(1-s^2) log|zeta - s| ds, closed form valid for
// all zeta including the cut [-1,1] (where |v| = 1):
//   m = 0: -pi log|2v|,   m >= 1: -(pi/m) Re v^m,   v = inverse Joukowski.
double cheb_log_kernel(cplx v, int m) {
    if (m == 0) return -kPi * std::log(2.0 * std::abs(v));
    return -kPi / m * std::pow(v, m).real();
}

// Mode integrals of the two log kernels against interval j at point z.
struct ModeKernel {
    // log|z - t(s)| part: log(half) + log|zeta1 - s|
    cplx v1;
    double log_half;
    // log|1 - t(s) z| part: log|z*half| + log|zeta2 - s| (or the far-field form)
    bool far;          // |zeta2| large: only the m = 0 term survives
    double far_m0;     // pi * log|1 - z*mid|
    cplx v2;
    double log_zhalf;

    static ModeKernel make(cplx z, double mid, double half) {
        ModeKernel k;
        cplx zeta1 = (z - mid) / half;
        k.v1 = inv_joukowski(zeta1);
        k.log_half = std::log(half);
        cplx zh = z * half;
        if (std::abs(zh) * 1e8 < std::abs(1.0 - z * mid) + 1.0) {
            k.far = true;
            k.far_m0 = kPi * std::log(std::abs(1.0 - z * mid));
            k.v2 = cplx(0.0, 0.0);
            k.log_zhalf = 0.0;
        } else {
            k.far = false;
            k.far_m0 = 0.0;
            cplx zeta2 = (1.0 - z * mid) / zh;
            k.v2 = inv_joukowski(zeta2);
            k.log_zhalf = std::log(std::abs(zh));
        }
        return k;
    }

    // \int g_D(z, t(s)) T_m(s)/sqrt(1-s^2) ds
    double green_mode(int m) const {
        double log_abs = (m == 0 ? kPi * log_half : 0.0) + cheb_log_kernel(v1, m);
        double one_minus;
        if (far) {
            one_minus = m == 0 ? far_m0 : 0.0;
        } else {
            one_minus = (m == 0 ? kPi * log_zhalf : 0.0) + cheb_log_kernel(v2, m);
        }
        return one_minus - log_abs;
    }
};

std::vector<EquilibriumMeasure::Panel> build_panels(const std::vector<Interval>& S, int M) {
    double total = 0.0;
    for (const Interval& iv : S) total += iv.length();
    std::vector<EquilibriumMeasure::Panel> panels;
    int remaining = M;
    for (std::size_t j = 0; j < S.size(); ++j) {
        int K = (j + 1 == S.size())
                    ? remaining
                    : std::max(8, static_cast<int>(std::lround(M * S[j].length() / total)));
        K = std::min(K, remaining - 8 * static_cast<int>(S.size() - 1 - j));
        remaining -= K;
        // Chebyshev-graded breakpoints, clustered at the endpoints where the
        // density has inverse-square-root growth
        for (int k = 0; k < K; ++k) {
            double t0 = 0.5 * (1.0 - std::cos(kPi * k / K));
            double t1 = 0.5 * (1.0 - std::cos(kPi * (k + 1) / K));
            EquilibriumMeasure::Panel p;
            p.a = k == 0 ? S[j].a : S[j].a + S[j].length() * t0;
            p.b = k + 1 == K ? S[j].b : S[j].a + S[j].length() * t1;
            panels.push_back(p);
        }
    }
    return panels;
}

int modes_per_interval(int M, int k_intervals) {
    return std::max(32, std::min(128, M / (2 * k_intervals)));
}

}  // namespace

double int_log_abs(cplx z, double alpha, double beta) {
    if (z.imag() == 0.0) {
        return F_real(z.real(), beta) - F_real(z.real(), alpha);
    }
    // z - t keeps a constant nonzero imaginary part along the segment, so the
    // principal log is continuous and the antiderivative applies end to end
    auto G = [&z](double t) {
        cplx u = cplx(t, 0.0) - z;
        return (u * (std::log(-u) - 1.0)).real();
    };
    return G(beta) - G(alpha);
}

double green_disk(cplx z, cplx t) {
    if (!(std::abs(z) < 1.0) || !(std::abs(t) < 1.0))
        throw ValidationError("green_disk arguments must lie in the open unit disk");
    if (z == t) throw ValidationError("green_disk is singular on the diagonal");
    return std::log(std::abs(1.0 - std::conj(t) * z)) - std::log(std::abs(z - t));
}

double EquilibriumMeasure::mass() const {
    double m = 0.0;
    for (const Panel& p : panels) m += p.mass();
    return m;
}

double EquilibriumMeasure::cdf(double x) const {
    double acc = 0.0;
    for (const Spectral& sp : modes) {
        double lo = sp.lo, hi = sp.hi;
        if (x <= lo) continue;
        if (x >= hi) {
            acc += kPi * sp.coeff[0];
            continue;
        }
        double s = std::clamp((x - sp.mid) / sp.half, -1.0, 1.0);
        double phi = std::acos(s);
        acc += sp.coeff[0] * (kPi - phi);
        for (std::size_t m = 1; m < sp.coeff.size(); ++m)
            acc -= sp.coeff[m] * std::sin(m * phi) / m;
    }
    return acc;
}

double EquilibriumMeasure::density_at(double t) const {
    for (const Spectral& sp : modes) {
        if (t < sp.lo || t > sp.hi) continue;
        double s = std::clamp((t - sp.mid) / sp.half, -1.0, 1.0);
        double u = 0.0;
        double phi = std::acos(s);
        for (std::size_t m = 0; m < sp.coeff.size(); ++m) u += sp.coeff[m] * std::cos(m * phi);
        double w = std::sqrt(std::max(1.0 - s * s, 0.0)) * sp.half;
        return w > 0.0 ? u / w : std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

EquilibriumMeasure equilibrium_measure(const std::vector<Interval>& S, int M) {
    if (S.empty()) throw ValidationError("equilibrium measure needs a nonempty support");
    std::vector<Interval> sorted = S;
    std::sort(sorted.begin(), sorted.end(),
              [](const Interval& x, const Interval& y) { return x.a < y.a; });
    for (const Interval& iv : sorted) {
        if (!(-1.0 < iv.a && iv.a < iv.b && iv.b < 1.0))
            throw ValidationError("support intervals must satisfy -1 < a < b < 1");
    }
    for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
        if (sorted[j].b >= sorted[j + 1].a) throw ValidationError("support intervals overlap");
    }
    if (M < 50) throw ValidationError("panel count must be at least 50");

    EquilibriumMeasure mu;
    mu.support = sorted;
    const int k = static_cast<int>(sorted.size());
    const int P = modes_per_interval(M, k);
    mu.modes.resize(k);
    for (int j = 0; j < k; ++j) {
        mu.modes[j].lo = sorted[j].a;
        mu.modes[j].hi = sorted[j].b;
        mu.modes[j].mid = 0.5 * (sorted[j].a + sorted[j].b);
        mu.modes[j].half = 0.5 * (sorted[j].b - sorted[j].a);
        mu.modes[j].coeff.assign(P, 0.0);
    }

    // Collocation at Chebyshev nodes of every interval plus the mass row.
    const int dim = k * P + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    int row = 0;
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < P; ++i, ++row) {
            double s = std::cos(kPi * (i + 0.5) / P);
            cplx x(mu.modes[j].mid + mu.modes[j].half * s, 0.0);
            for (int jp = 0; jp < k; ++jp) {
                ModeKernel kern = ModeKernel::make(x, mu.modes[jp].mid, mu.modes[jp].half);
                for (int m = 0; m < P; ++m) A(row, jp * P + m) = kern.green_mode(m);
            }
            A(row, dim - 1) = -1.0;
        }
    }
    for (int j = 0; j < k; ++j) A(row, j * P) = kPi;  // total mass
    rhs(row) = 1.0;

    Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
    if (!sol.allFinite()) throw NumericalError("equilibrium collocation system is singular");
    // renormalize to exact unit mass (the solve leaves a residual at the
    // level of the matrix conditioning); the constant scales along
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += kPi * sol(j * P);
    if (!(total > 0.0)) throw NumericalError("equilibrium mass is not positive");
    for (int j = 0; j < k; ++j)
        for (int m = 0; m < P; ++m) mu.modes[j].coeff[m] = sol(j * P + m) / total;
    mu.potential_constant = sol(dim - 1) / total;
    if (!(mu.potential_constant > 0.0))
        throw NumericalError("equilibrium constant is not positive");
    mu.capacity = 1.0 / mu.potential_constant;

    // nonnegativity of the resolved density
    for (int j = 0; j < k; ++j) {
        double mx = 0.0, mn = 0.0;
        for (int q = 0; q <= 512; ++q) {
            double phi = kPi * q / 512;
            double u = 0.0;
            for (int m = 0; m < P; ++m) u += mu.modes[j].coeff[m] * std::cos(m * phi);
            mx = std::max(mx, std::abs(u));
            mn = std::min(mn, u);
        }
        if (mn < -1e-8 * std::max(mx, 1e-30))
            throw NumericalError("equilibrium density came out negative; refine the modes");
    }

    // piecewise-constant panel view with the exact panel masses
    mu.panels = build_panels(sorted, M);
    for (auto& p : mu.panels) p.density = (mu.cdf(p.b) - mu.cdf(p.a)) / p.length();
    return mu;
}

double green_potential(const EquilibriumMeasure& mu, cplx z) {
    if (!(std::abs(z) < 1.0))
        throw ValidationError("green potential is defined inside the unit disk");
    double acc = 0.0;
    for (const auto& sp : mu.modes) {
        ModeKernel kern = ModeKernel::make(z, sp.mid, sp.half);
        for (std::size_t m = 0; m < sp.coeff.size(); ++m)
            acc += sp.coeff[m] * kern.green_mode(static_cast<int>(m));
    }
    return acc;
}

double green_energy(const EquilibriumMeasure& mu) {
    // E = \int U dmu by Gauss-Chebyshev on each interval (U is smooth on S)
    double acc = 0.0;
    for (const auto& sp : mu.modes) {
        const int Q = 2 * static_cast<int>(sp.coeff.size());
        for (int q = 0; q < Q; ++q) {
            double phi = kPi * (q + 0.5) / Q;
            double s = std::cos(phi);
            double u = 0.0;
            for (std::size_t m = 0; m < sp.coeff.size(); ++m)
                u += sp.coeff[m] * std::cos(m * phi);
            acc += (kPi / Q) * u * green_potential(mu, cplx(sp.mid + sp.half * s, 0.0));
        }
    }
    return acc;
}

double predicted_rate(const EquilibriumMeasure& mu) { return std::exp(-1.0 / mu.capacity); }

std::vector<Interval> mobius_image(const std::vector<Interval>& S, double w) {
    if (!(std::abs(w) < 1.0)) throw ValidationError("Mobius parameter must satisfy |w| < 1");
    auto M = [w](double x) { return (x - w) / (1.0 - w * x); };
    std::vector<Interval> out;
    out.reserve(S.size());
    for (const Interval& iv : S) out.push_back({M(iv.a), M(iv.b)});
    std::sort(out.begin(), out.end(),
              [](const Interval& x, const Interval& y) { return x.a < y.a; });
    return out;
}

std::vector<Interval> support_of(const MeasureSpec& spec) {
    std::vector<Interval> S;
    for (const IntervalTerm& iv : spec.intervals()) S.push_back({iv.a(), iv.b()});
    return S;
}

}  // namespace aaklab
