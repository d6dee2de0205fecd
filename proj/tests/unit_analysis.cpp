#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "aaklab/analysis.hpp"
#include "test_measures.hpp"

using namespace aaklab;
using namespace aaklab::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("angle function") {
    std::vector<Interval> S{{-0.5, 0.5}};
    // pi on the support (interior points and the left endpoint)
    CHECK(angle_seen(cplx(0.0, 0.0), S) == doctest::Approx(kPi));
    CHECK(angle_seen(cplx(0.25, 0.0), S) == doctest::Approx(kPi));
    CHECK(angle_seen(cplx(-0.5, 0.0), S) == doctest::Approx(kPi));
    // right-angle geometry
    CHECK(angle_seen(cplx(0, 1), {{-1.0, 1.0}}) == doctest::Approx(kPi / 2));
    // collinear exterior point sees a zero angle
    CHECK(angle_seen(cplx(2, 0), S) == doctest::Approx(0.0));
    // range and additivity over a system of intervals
    std::vector<Interval> S3{{-0.8, -0.2}, {0.1, 0.3}, {0.5, 0.9}};
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ur(-2.0, 2.0);
    for (int k = 0; k < 500; ++k) {
        cplx xi(ur(rng), ur(rng));
        double a = angle_seen(xi, S3);
        CHECK(a >= -1e-12);
        CHECK(a <= kPi + 1e-12);
    }
    for (double x : {-0.5, 0.2, 0.77}) CHECK(angle_seen(cplx(x, 0), S3) == doctest::Approx(kPi));
    // off the support the angle is strictly below pi
    CHECK(angle_seen(cplx(0.4, 0), S3) < kPi - 1e-6);
    CHECK(angle_seen(cplx(0.2, 0.01), S3) < kPi - 1e-6);
}

TEST_CASE("weak-star distance against a sampling oracle") {
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 400);
    // draw 200 points from mu by inverse CDF
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    std::vector<cplx> poles;
    for (int k = 0; k < 200; ++k) {
        double u = ur(rng);
        double lo = -0.5, hi = 0.5;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (mu.cdf(mid) < u ? lo : hi) = mid;
        }
        poles.emplace_back(0.5 * (lo + hi), 0.0);
    }
    PoleDiagnostics d = weak_star_distance(poles, mu);
    CHECK(d.ks_distance <= 0.08);
    CHECK(d.outliers.empty());
    CHECK(d.near_support.size() == 200);
}

TEST_CASE("weak-star distance edge cases") {
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 200);
    // point mass at an endpoint: sup-CDF gap near 1
    std::vector<cplx> at_end(40, cplx(-0.5, 0.0));
    PoleDiagnostics d = weak_star_distance(at_end, mu);
    CHECK(d.ks_distance > 0.9);
    // all poles far from S: flagged, distance 1
    std::vector<cplx> far{{0.0, 0.9}, {0.0, -0.9}};
    PoleDiagnostics d2 = weak_star_distance(far, mu);
    CHECK(d2.empty_near);
    CHECK(d2.ks_distance == 1.0);
    CHECK(d2.outliers.size() == 2);
}

TEST_CASE("outlier count is monotone in delta") {
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 200);
    std::vector<cplx> poles{{0.0, 0.01}, {0.2, 0.2}, {0.4, 0.6}, {-0.3, 0.04}};
    std::size_t prev = 1000;
    for (double delta : {0.02, 0.05, 0.3, 0.7}) {
        PoleDiagnostics d = weak_star_distance(poles, mu, delta);
        CHECK(d.outliers.size() <= prev);
        prev = d.outliers.size();
    }
}

TEST_CASE("rate table on synthetic geometric errors") {
    double rho = 0.37;
    std::vector<std::pair<int, double>> errs;
    for (int n = 5; n <= 15; ++n) errs.emplace_back(n, std::pow(rho, 2 * n));
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 200);
    RateTable t = rate_table(errs, mu.capacity);
    CHECK(std::abs(t.fitted_limit - rho) < 1e-10);
    CHECK(t.fit_count == 11);
    // underflow exclusion
    errs.emplace_back(16, 1e-20);
    RateTable t2 = rate_table(errs, mu.capacity);
    CHECK(t2.records.back().excluded);
    CHECK(t2.fit_count == 11);
}

TEST_CASE("rate table needs five usable degrees") {
    std::vector<std::pair<int, double>> errs{{1, 0.5}, {2, 0.25}, {3, 0.12}};
    CHECK_THROWS_AS(rate_table(errs, 1.0), ValidationError);
}

TEST_CASE("attraction audit") {
    MeasureSpec spec = three_interval_spec();
    SUBCASE("overlapping balls rejected") {
        std::vector<std::pair<int, std::vector<cplx>>> fam{{1, {}}};
        CHECK_THROWS_AS(attraction_audit(fam, spec, 0.6), ValidationError);
    }
    SUBCASE("counts and the lower bound") {
        cplx e1(-3.0 / 7.0, 4.0 / 7.0), e2(5.0 / 9.0, 3.0 / 4.0), e3(-0.2, -6.0 / 7.0);
        std::vector<std::pair<int, std::vector<cplx>>> fam;
        fam.emplace_back(4, std::vector<cplx>{e1 + 0.01, e2, e3 - cplx(0, 0.02)});
        fam.emplace_back(9, std::vector<cplx>{e1, e1 + 0.05, e2, e2, e2, e3, e3, e3, e3});
        fam.emplace_back(10, std::vector<cplx>{e1, e1 + 0.02, e2, e2, e2, e3, e3, e3, e3,
                                               cplx(0.45, 0)});
        auto recs = attraction_audit(fam, spec, 0.15);
        REQUIRE(recs.size() == 3);
        CHECK(recs[0].count_per_n == std::vector<std::pair<int, int>>{{4, 1}, {9, 2}, {10, 2}});
        CHECK(recs[0].lower_ok);   // >= 2 from n = 9 onward
        CHECK(recs[1].lower_ok);   // 3 at the last two degrees
        CHECK(recs[2].lower_ok);
    }
}

TEST_CASE("angle bound audit reduces to (m+s-1)pi + V(phi) for real markov") {
    MeasureSpec spec = markov_uniform();
    std::vector<cplx> poles{{0.1, 0.0}, {-0.3, 0.0}};  // on S: lhs = 0
    AngleBoundAudit audit = angle_bound_audit(poles, spec, Poly{cplx(1, 0)});
    CHECK(audit.lhs == doctest::Approx(0.0));
    CHECK(audit.rhs == doctest::Approx(0.0));  // V(phi) = 0, no poles, m = s' = ... m+s-1 = 0
    CHECK(audit.holds);
}

TEST_CASE("angle bound audit on the three-interval measure") {
    MeasureSpec spec = three_interval_spec();
    std::vector<cplx> poles{{0.44, 0.0}, {-0.5, 0.1}, {0.0, 0.5}};
    AngleBoundAudit audit = angle_bound_audit(poles, spec, Poly{cplx(1, 0)});
    // rhs carries V(phi) + sum m(eta) theta(eta) + (m+s-1) pi with m=3, s=9
    CHECK(audit.rhs > 11 * kPi);
    CHECK(audit.lhs > 0.0);
    CHECK(audit.holds);
}

TEST_CASE("upper attraction audit") {
    MeasureSpec spec = three_interval_spec();
    cplx e1(-3.0 / 7.0, 4.0 / 7.0), e2(5.0 / 9.0, 3.0 / 4.0), e3(-0.2, -6.0 / 7.0);
    std::vector<std::pair<int, std::vector<cplx>>> fam;
    fam.emplace_back(10, std::vector<cplx>{e1, e1, e2, e2, e2, e3, e3, e3, e3, e3});
    auto recs = attraction_audit(fam, spec, 0.15);
    // one excess pole at e3: lhs = (5 - 4)(pi - theta(e3)), well under the budget
    UpperAttractionAudit ua = upper_attraction_audit(recs, spec, 0.2);
    std::vector<Interval> S = support_of(spec);
    CHECK(ua.lhs == doctest::Approx(kPi - angle_seen(e3, S)));
    CHECK(ua.rhs > 7 * kPi);  // (3 + 0 - 1) pi + 2 * 9-ish angles + variations
    CHECK(ua.holds);
}

TEST_CASE("capacity convergence field probes") {
    MeasureSpec spec = markov_uniform();
    HankelSystem sys = build_hankel(moments(spec, 128));
    auto triples = singular_triples(sys, 10);
    Approximant g = aak_approximant(sys, triples[10]);
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 400);
    auto probes = capacity_convergence_field(spec, g, mu, {cplx(0, 0.9), cplx(0.2, 0.6)});
    for (const auto& p : probes) {
        CHECK(p.observed > 0.0);
        CHECK(p.predicted > 0.0);
        CHECK(p.predicted < 1.0);
        // interior probes: observed within a factor bracket of the prediction
        CHECK(p.observed / p.predicted > 0.7);
        CHECK(p.observed / p.predicted < 1.35);
    }
    // on-boundary prediction reduces to exp(-1/cap)
    auto tp = capacity_convergence_field(spec, g, mu, {cplx(1.0, 0.0)});
    CHECK(tp[0].predicted == doctest::Approx(std::exp(-1.0 / mu.capacity)));
    // probe too close to the support is rejected
    CHECK_THROWS_AS(capacity_convergence_field(spec, g, mu, {cplx(0.5001, 0.0)}),
                    ValidationError);
}

TEST_CASE("exterior probe at a reflected support point") {
    // at z = 2 the prediction uses the reflected potential; the observed
    // n-th root tracks it while the error stays above the float noise of
    // F - g (from n = 7 on, sigma_n exp(-2n U) sinks below that noise)
    MeasureSpec spec = markov_uniform();
    HankelSystem sys = build_hankel(moments(spec, 128));
    auto triples = singular_triples(sys, 6);
    Approximant g = aak_approximant(sys, triples[6]);
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 400);
    auto probes = capacity_convergence_field(spec, g, mu, {cplx(2.0, 0.0)});
    REQUIRE(probes.size() == 1);
    CHECK(probes[0].near_reflected_support);
    double ratio = probes[0].observed / probes[0].predicted;
    CHECK(ratio > 0.8);
    CHECK(ratio < 1.25);
}
