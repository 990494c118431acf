#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bohmflow/minkowski.hpp"
#include "bohmflow/rng.hpp"

using namespace bohmflow;

TEST_CASE("signature: pure-time unit vector contracts to -1") {
    const FourVector u(0.0, 1.0);  // (x=0, ct=c with c=1)
    CHECK(minkowski_dot(u, u) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("orthogonal split of spatial and temporal parts") {
    const FourVector a(1.0, 0.0), b(0.0, 1.0);
    CHECK(minkowski_dot(a, b) == doctest::Approx(0.0));
}

TEST_CASE("on-shell wave vector is normalized to -1 (m=c=hbar=1, k=0.3)") {
    // dispersion relation: omega = sqrt(k^2 + 1)
    const double omega = std::sqrt(1.0 + 0.3 * 0.3);
    const FourVector p(0.3, omega);
    CHECK(minkowski_dot(p, p) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(0.3 * 0.3 - omega * omega == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("dimension mismatch raises a configuration error") {
    const FourVector a(1.0, 0.0);
    const FourVector b(1.0, 0.0, 0.0);
    CHECK_THROWS_AS(minkowski_dot(a, b), ConfigurationError);
    CHECK_THROWS_AS(minkowski_dot(a, a, Metric(2)), ConfigurationError);
}

TEST_CASE("boost identity at beta = 0") {
    const FourVector v(0.0, 1.0);
    const FourVector b = lorentz_boost(v, 0.0);
    CHECK(b.spatial(0) == doctest::Approx(0.0));
    CHECK(b.temporal() == doctest::Approx(1.0));
}

TEST_CASE("boost of a unit spatial vector at beta = 0.6") {
    // gamma = 1/sqrt(1-0.36) = 1.25: x' = gamma x, ct' = -gamma beta x
    const FourVector v(1.0, 0.0);
    const FourVector b = lorentz_boost(v, 0.6);
    CHECK(b.spatial(0) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(b.temporal() == doctest::Approx(-0.75).epsilon(1e-14));
}

TEST_CASE("boost round trip returns the input to 1e-12") {
    Rng rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const FourVector v(rng.uniform(-5, 5), rng.uniform(-5, 5));
        const double beta = rng.uniform(-0.9, 0.9);
        const FourVector w = lorentz_boost(lorentz_boost(v, beta), -beta);
        CHECK(std::abs(w.spatial(0) - v.spatial(0)) < 1e-12 * (1.0 + std::abs(v.spatial(0))));
        CHECK(std::abs(w.temporal() - v.temporal()) < 1e-12 * (1.0 + std::abs(v.temporal())));
    }
}

TEST_CASE("|beta| >= 1 is out of domain") {
    const FourVector v(1.0, 0.0);
    CHECK_THROWS_AS(lorentz_boost(v, 1.0), DomainError);
    CHECK_THROWS_AS(lorentz_boost(v, -1.3), DomainError);
}

TEST_CASE("minkowski_dot is invariant under boosts for random vectors") {
    Rng rng(987654);
    for (int trial = 0; trial < 300; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform() * 3.0) % 3;
        FourVector a(d), b(d);
        for (int j = 0; j < d; ++j) {
            a.spatial(j) = rng.uniform(-3, 3);
            b.spatial(j) = rng.uniform(-3, 3);
        }
        a.temporal() = rng.uniform(-3, 3);
        b.temporal() = rng.uniform(-3, 3);
        const double beta = rng.uniform(-0.99, 0.99);
        const int axis = static_cast<int>(rng.uniform() * d) % d;
        const double before = minkowski_dot(a, b);
        const double after =
            minkowski_dot(lorentz_boost(a, beta, axis), lorentz_boost(b, beta, axis));
        const double scale = std::max(1.0, std::abs(before));
        CHECK(std::abs(after - before) / scale < 1e-10);
    }
}

TEST_CASE("finite-difference Jacobian of the boost map equals unity") {
    // central differences of the map x -> boost(x) on a random event
    Rng rng(42);
    const double beta = 0.73;
    const FourVector x0(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const double h = 1e-6;
    double j[2][2];
    for (int col = 0; col < 2; ++col) {
        FourVector xp = x0, xm = x0;
        if (col == 0) {
            xp.spatial(0) += h;
            xm.spatial(0) -= h;
        } else {
            xp.temporal() += h;
            xm.temporal() -= h;
        }
        const FourVector bp = lorentz_boost(xp, beta), bm = lorentz_boost(xm, beta);
        j[0][col] = (bp.spatial(0) - bm.spatial(0)) / (2 * h);
        j[1][col] = (bp.temporal() - bm.temporal()) / (2 * h);
    }
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    CHECK(std::abs(det - 1.0) < 1e-8);
}

TEST_CASE("particle and constant validation") {
    CHECK_THROWS_AS((ParticleParams{-1.0, 0.0}.validate()), ConfigurationError);
    CHECK_THROWS_AS((Constants{0.0, 1.0}.validate()), ConfigurationError);
    CHECK_NOTHROW((Constants{0.5, 2.0}.validate()));
}
