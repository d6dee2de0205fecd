#include "aaklab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aaklab/quadrature.hpp"

namespace aaklab {

namespace {

constexpr int kProbeGrid = 2048;
constexpr double kPi = 3.14159265358979323846;

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// integer power by repeated multiplication (exact for dyadic reals)
cplx ipow(cplx base, int e) {
    cplx acc(1.0, 0.0);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

}  // namespace

IntervalTerm::IntervalTerm(double a, double b, DensityExpr density)
    : a_(a), b_(b), density_(std::move(density)) {
    if (!(-1.0 < a && a < b && b < 1.0))
        throw ValidationError("interval endpoints must satisfy -1 < a < b < 1");
    if (!density_.valid()) throw ValidationError("interval density is empty");
    min_abs_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kProbeGrid; ++i) {
        double t = a_ + (b_ - a_) * i / kProbeGrid;
        cplx v = density_.eval(cplx(t, 0.0));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("density is not finite at t=" + std::to_string(t));
        min_abs_ = std::min(min_abs_, std::abs(v));
    }
    if (!(min_abs_ > 0.0))
        throw ValidationError("density vanishes on the interval (violates the lower bound condition)");
}

PolarTerm::PolarTerm(cplx eta, std::vector<cplx> coeffs) : eta_(eta), coeffs_(std::move(coeffs)) {
    if (!(std::abs(eta_) < 1.0)) throw ValidationError("polar point must lie in the open unit disk");
    if (coeffs_.empty()) throw ValidationError("polar term needs at least one coefficient");
    if (std::abs(coeffs_.back()) == 0.0)
        throw ValidationError("leading polar coefficient is zero (multiplicity not exact)");
}

cplx PolarTerm::eval(cplx z) const {
    cplx acc(0.0, 0.0);
    cplx inv = 1.0 / (z - eta_);
    cplx q = inv;  // (z-eta)^{-(k+1)}
    for (const cplx& r : coeffs_) {
        acc += r * q;
        q *= inv;
    }
    return acc;
}

MeasureSpec::MeasureSpec(std::vector<IntervalTerm> intervals, std::vector<PolarTerm> poles)
    : intervals_(std::move(intervals)), poles_(std::move(poles)) {
    if (intervals_.empty())
        throw ValidationError("measure needs at least one interval term (infinite support)");
    std::sort(intervals_.begin(), intervals_.end(),
              [](const IntervalTerm& x, const IntervalTerm& y) { return x.a() < y.a(); });
    for (std::size_t i = 0; i + 1 < intervals_.size(); ++i) {
        if (intervals_[i].b() >= intervals_[i + 1].a())
            throw ValidationError("interval terms overlap or touch");
    }
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        for (std::size_t j = i + 1; j < poles_.size(); ++j) {
            if (poles_[i].eta() == poles_[j].eta())
                throw ValidationError("duplicate polar point");
        }
        for (const IntervalTerm& iv : intervals_) {
            if (poles_[i].eta() == cplx(iv.a(), 0.0) || poles_[i].eta() == cplx(iv.b(), 0.0))
                throw ValidationError("polar point coincides with an interval endpoint");
        }
    }
}

double MeasureSpec::support_radius() const {
    double r = 0.0;
    for (const IntervalTerm& iv : intervals_) r = std::max({r, std::abs(iv.a()), std::abs(iv.b())});
    for (const PolarTerm& p : poles_) r = std::max(r, std::abs(p.eta()));
    return r;
}

int MeasureSpec::polar_degree_excess() const {
    int e = 0;
    for (const PolarTerm& p : poles_) e = std::max(e, p.multiplicity() - 1);
    return e;
}

double MeasureSpec::moment_bound_constant(double quad_tol) const {
    double C = 0.0;
    for (const IntervalTerm& iv : intervals_) {
        cplx mass = integrate_or_throw(
            [&iv](double t) { return cplx(std::abs(iv.density_at(t)), 0.0); }, iv.a(), iv.b(),
            quad_tol);
        C += mass.real();
    }
    const double rho = support_radius();
    for (const PolarTerm& p : poles_) {
        double fact = 1.0;
        for (int l = 0; l < p.multiplicity(); ++l) {
            if (l > 0) fact *= l;
            C += std::abs(p.coeffs()[l]) / (fact * std::pow(rho, l));
        }
    }
    return C;
}

double MeasureSpec::distance_to_intervals(cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const IntervalTerm& iv : intervals_) {
        double dx = 0.0;
        if (z.real() < iv.a()) dx = iv.a() - z.real();
        else if (z.real() > iv.b()) dx = z.real() - iv.b();
        d = std::min(d, std::hypot(dx, z.imag()));
    }
    return d;
}

double MeasureSpec::distance_to_support(cplx z) const {
    double d = distance_to_intervals(z);
    for (const PolarTerm& p : poles_) d = std::min(d, std::abs(z - p.eta()));
    return d;
}

MeasureSpec MeasureSpec::from_json(const nlohmann::json& j) {
    std::vector<IntervalTerm> ivs;
    std::vector<PolarTerm> ps;
    if (!j.contains("intervals") || !j["intervals"].is_array())
        throw ValidationError("measure json: missing 'intervals' array");
    for (const auto& e : j["intervals"]) {
        ivs.emplace_back(e.at("a").get<double>(), e.at("b").get<double>(),
                         e.at("density").get<std::string>());
    }
    if (j.contains("poles")) {
        for (const auto& e : j["poles"]) {
            const auto& eta = e.at("eta");
            cplx h(eta.at(0).get<double>(), eta.at(1).get<double>());
            std::vector<cplx> cs;
            for (const auto& c : e.at("coeffs"))
                cs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
            ps.emplace_back(h, std::move(cs));
        }
    }
    return MeasureSpec(std::move(ivs), std::move(ps));
}

nlohmann::json MeasureSpec::to_json() const {
    nlohmann::json j;
    j["intervals"] = nlohmann::json::array();
    for (const IntervalTerm& iv : intervals_) {
        j["intervals"].push_back(
            {{"a", iv.a()}, {"b", iv.b()}, {"density", iv.density().str()}});
    }
    j["poles"] = nlohmann::json::array();
    for (const PolarTerm& p : poles_) {
        nlohmann::json cs = nlohmann::json::array();
        for (const cplx& c : p.coeffs()) cs.push_back({c.real(), c.imag()});
        j["poles"].push_back({{"eta", {p.eta().real(), p.eta().imag()}}, {"coeffs", cs}});
    }
    return j;
}

bool MomentSequence::satisfies_decay_bound(double slack) const {
    for (int k = 0; k < N; ++k) {
        double bound = decay_C * std::pow(1.0 + k, excess) * std::pow(rho, k);
        if (std::abs(m[k]) > slack * bound + 1e-300) return false;
    }
    return true;
}

cplx cauchy_transform(const MeasureSpec& spec, cplx z, double tol) {
    const double clearance = spec.distance_to_support(z);
    if (clearance < 1e-13)
        throw NumericalError("cauchy transform evaluated on the support of the measure");
    cplx acc(0.0, 0.0);
    for (const IntervalTerm& iv : spec.intervals()) {
        acc += integrate_or_throw(
            [&iv, z](double t) { return iv.density_at(t) / (z - t); }, iv.a(), iv.b(), tol);
    }
    for (const PolarTerm& p : spec.poles()) acc += p.eval(z);
    return acc;
}

MomentSequence moments(const MeasureSpec& spec, int N, double tol) {
    if (N < 1) throw ValidationError("moment count must be >= 1");
    MomentSequence out;
    out.N = N;
    out.m.assign(N, cplx(0.0, 0.0));
    for (const IntervalTerm& iv : spec.intervals()) {
        for (int k = 0; k < N; ++k) {
            out.m[k] += integrate_or_throw(
                [&iv, k](double t) { return std::pow(t, k) * iv.density_at(t); }, iv.a(), iv.b(),
                tol);
        }
    }
    for (const PolarTerm& p : spec.poles()) {
        const cplx eta = p.eta();
        for (int l = 0; l < p.multiplicity(); ++l) {
            const cplx r = p.coeffs()[l];
            if (r == cplx(0.0, 0.0)) continue;
            for (int k = l; k < N; ++k) {
                // moment of the k-th power against the order-l point distribution
                out.m[k] += r * binom(k, l) * ipow(eta, k - l);
            }
        }
    }
    out.rho = spec.support_radius();
    out.excess = spec.polar_degree_excess();
    out.decay_C = spec.moment_bound_constant();
    return out;
}

double moment_tail_bound(const MomentSequence& mom, cplx z) {
    const double az = std::abs(z);
    if (az <= mom.rho) return std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (int k = mom.N; k < mom.N + 100000; ++k) {
        double term = mom.decay_C * std::pow(1.0 + k, mom.excess) * std::pow(mom.rho, k) /
                      std::pow(az, k + 1);
        total += term;
        if (term < 1e-18 * total) break;
    }
    return total;
}

double arg_variation_on_interval(const std::function<cplx(double)>& f, double a, double b,
                                 int base_grid, int max_refine) {
    double prev = -1.0;
    int grid = base_grid;
    for (int pass = 0; pass <= max_refine; ++pass) {
        double var = 0.0;
        bool resolved = true;
        double last = std::arg(f(a));
        for (int i = 1; i <= grid; ++i) {
            double t = a + (b - a) * i / grid;
            double cur = std::arg(f(t));
            double d = cur - last;
            while (d > kPi) d -= 2 * kPi;
            while (d <= -kPi) d += 2 * kPi;
            if (std::abs(d) > 0.9 * kPi) resolved = false;
            var += std::abs(d);
            last = cur;
        }
        if (resolved && prev >= 0.0 && std::abs(var - prev) < 1e-6) return var;
        if (pass == max_refine) {
            if (!resolved) return std::numeric_limits<double>::infinity();
            return var;
        }
        prev = resolved ? var : -1.0;
        grid *= 4;
    }
    return std::numeric_limits<double>::infinity();
}

double argument_variation(const MeasureSpec& spec) {
    double total = 0.0;
    for (const IntervalTerm& iv : spec.intervals()) {
        double v = arg_variation_on_interval(
            [&iv](double t) { return iv.density_at(t); }, iv.a(), iv.b());
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        total += v;
    }
    return total;
}

}  // namespace aaklab
