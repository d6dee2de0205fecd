#include "aaklab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace aaklab {

namespace {

struct Rule {
    std::vector<double> x, w;
};

// Newton iteration on P_n, standard half-interval symmetry.
Rule compute_rule(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double p0, p1, dp;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

const Rule& rule(int order) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

cplx gl_apply(const std::function<cplx(double)>& f, double a, double b, const Rule& r) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(mid + half * r.x[i]);
    return half * acc;
}

constexpr int kOrder = 24;

struct Worker {
    const std::function<cplx(double)>& f;
    const Rule& r;
    double err = 0.0;
    bool ok = true;

    cplx go(double a, double b, cplx whole, double tol, int depth) {
        cplx left = gl_apply(f, a, 0.5 * (a + b), r);
        cplx right = gl_apply(f, 0.5 * (a + b), b, r);
        double e = std::abs(whole - left - right);
        if (e <= tol || depth <= 0) {
            if (e > tol) ok = false;
            err += e;
            return left + right;
        }
        return go(a, 0.5 * (a + b), left, 0.5 * tol, depth - 1) +
               go(0.5 * (a + b), b, right, 0.5 * tol, depth - 1);
    }
};

}  // namespace

const std::vector<double>& gl_nodes(int order) { return rule(order).x; }
const std::vector<double>& gl_weights(int order) { return rule(order).w; }

QuadResult integrate(const std::function<cplx(double)>& f, double a, double b,
                     double abs_tol, int max_depth) {
    const Rule& r = rule(kOrder);
    Worker w{f, r};
    cplx whole = gl_apply(f, a, b, r);
    QuadResult out;
    out.value = w.go(a, b, whole, abs_tol, max_depth);
    out.err_est = w.err;
    out.converged = w.ok;
    return out;
}

cplx integrate_or_throw(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol) {
    QuadResult q = integrate(f, a, b, abs_tol);
    if (!q.converged)
        throw QuadratureError("quadrature failed to reach tolerance " + std::to_string(abs_tol));
    return q.value;
}

}  // namespace aaklab
