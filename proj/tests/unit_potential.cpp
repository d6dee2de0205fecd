#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "aaklab/pipeline.hpp"
#include "aaklab/potential.hpp"

using namespace aaklab;

TEST_CASE("green function of the disk") {
    CHECK(std::abs(green_disk(cplx(0.5, 0), cplx(0, 0)) - std::log(2.0)) < 1e-14);
    // kernel symmetry
    cplx z(0.3, 0), t(0, 0.6);
    CHECK(std::abs(green_disk(z, t) - green_disk(t, z)) < 1e-14);
    // vanishes toward the boundary
    for (double th : {0.0, 1.1, 2.7}) {
        cplx zb = 0.999 * std::polar(1.0, th);
        CHECK(green_disk(zb, cplx(0.4, 0)) <= 1e-2);
        CHECK(green_disk(zb, cplx(0.4, 0)) >= 0.0);
    }
    CHECK_THROWS_AS(green_disk(cplx(1.1, 0), cplx(0, 0)), ValidationError);
    CHECK_THROWS_AS(green_disk(cplx(0.2, 0), cplx(0.2, 0)), ValidationError);
}

TEST_CASE("closed-form log integral matches quadrature") {
    // against a crude Riemann refinement, including x inside the panel
    auto oracle = [](cplx z, double a, double b) {
        int K = 200000;
        double acc = 0.0;
        for (int i = 0; i < K; ++i) {
            double t = a + (b - a) * (i + 0.5) / K;
            acc += std::log(std::abs(z - t));
        }
        return acc * (b - a) / K;
    };
    for (cplx z : {cplx(0.3, 0.0), cplx(0.05, 0.0), cplx(0.2, 0.4), cplx(-1.5, 0.1)}) {
        double exact = int_log_abs(z, 0.0, 0.1);
        CHECK(std::abs(exact - oracle(z, 0.0, 0.1)) < 1e-5);
    }
}

TEST_CASE("equilibrium measure on a single interval") {
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 200);
    CHECK(std::abs(mu.mass() - 1.0) < 1e-10);
    for (const auto& p : mu.panels) CHECK(p.density >= -1e-8);
    CHECK(mu.capacity > 0.0);

    // density symmetric about the origin
    const auto& ps = mu.panels;
    for (std::size_t i = 0; i < ps.size() / 2; ++i) {
        double d1 = ps[i].density;
        double d2 = ps[ps.size() - 1 - i].density;
        CHECK(std::abs(d1 - d2) <= 1e-8 * std::max(1.0, std::abs(d1)));
    }

    // potential equals the constant on S and decays toward T
    double c = mu.potential_constant;
    CHECK(std::abs(green_potential(mu, cplx(0.123, 0)) - c) / c < 1e-5);
    double outside = green_potential(mu, cplx(0, 0.9));
    CHECK(outside > 0.0);
    CHECK(outside < c);

    // Richardson refinement: capacity stable under panel doubling
    EquilibriumMeasure mu2 = equilibrium_measure({{-0.5, 0.5}}, 400);
    CHECK(std::abs(mu.capacity - mu2.capacity) < 1e-4);
}

TEST_CASE("flatness at off-collocation probes") {
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 400);
    CHECK(equilibrium_flatness(mu) < 1e-5);
}

TEST_CASE("capacity monotone under support growth") {
    EquilibriumMeasure small = equilibrium_measure({{-0.25, 0.25}}, 200);
    EquilibriumMeasure mid = equilibrium_measure({{-0.5, 0.5}}, 200);
    EquilibriumMeasure big = equilibrium_measure({{-0.7, 0.7}}, 200);
    CHECK(small.capacity < mid.capacity);
    CHECK(mid.capacity < big.capacity);
    // predicted rate decreases as the set shrinks
    CHECK(predicted_rate(small) < predicted_rate(mid));
}

TEST_CASE("Mobius invariance of the capacity") {
    std::vector<Interval> S{{-0.5, 0.5}};
    EquilibriumMeasure base = equilibrium_measure(S, 400);
    for (double w : {-0.3, 0.2, 0.5}) {
        EquilibriumMeasure img = equilibrium_measure(mobius_image(S, w), 400);
        CHECK(std::abs(img.capacity - base.capacity) < 1e-4);
    }
}

TEST_CASE("three-interval support self-consistency") {
    std::vector<Interval> S{{-6.0 / 7.0, -1.0 / 8.0}, {0.4, 0.5}, {2.0 / 3.0, 7.0 / 8.0}};
    EquilibriumMeasure mu = equilibrium_measure(S, 300);
    CHECK(std::abs(mu.mass() - 1.0) < 1e-10);
    for (const auto& p : mu.panels) CHECK(p.density >= -1e-8);
    double c = mu.potential_constant;
    // flat on all three components
    for (double x : {-0.5, -0.2, 0.45, 0.7, 0.8}) {
        CHECK(std::abs(green_potential(mu, cplx(x, 0)) - c) / c < 1e-4);
    }
    // interior maximum principle probe: strictly between 0 and the constant
    double v = green_potential(mu, cplx(0, 0.9));
    CHECK(v > 0.0);
    CHECK(v < c);
}

TEST_CASE("discrete energy equals the equilibrium constant") {
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 300);
    double e = green_energy(mu);
    CHECK(std::abs(e - mu.potential_constant) / mu.potential_constant < 1e-5);
}

TEST_CASE("predicted rate closed form") {
    EquilibriumMeasure mu = equilibrium_measure({{-0.5, 0.5}}, 200);
    CHECK(std::abs(predicted_rate(mu) - std::exp(-1.0 / mu.capacity)) < 1e-15);
}
