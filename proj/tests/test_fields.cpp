#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bohmflow/fields.hpp"
#include "bohmflow/rng.hpp"

using namespace bohmflow;

TEST_CASE("zero potential and tensor") {
    const auto f = EMPotential::zero();
    const FourVector x(1.3, -0.4);
    const auto a = f.potential_at(x);
    CHECK(a.spatial(0) == 0.0);
    CHECK(a.temporal() == 0.0);
    const auto t = f.field_tensor_at(x);
    for (int i = 0; i <= 1; ++i)
        for (int j = 0; j <= 1; ++j) CHECK(t(i, j) == 0.0);
}

TEST_CASE("constant electric field in the static gauge: phi = -E x") {
    const auto f = EMPotential::constant_electric(1.0, 0);
    const auto a = f.potential_at(FourVector(2.0, 0.7));
    CHECK(a.spatial(0) == doctest::Approx(0.0));
    CHECK(a.temporal() == doctest::Approx(-2.0));
}

TEST_CASE("constant electric field tensor has the +/-E mixed block") {
    const auto f = EMPotential::constant_electric(1.5, 0);
    const auto t = f.field_tensor_at(FourVector(0.3, 0.1));
    CHECK(t(0, 1) == doctest::Approx(1.5));
    CHECK(t(1, 0) == doctest::Approx(-1.5));
}

TEST_CASE("constant magnetic field needs two spatial axes") {
    const auto f = EMPotential::constant_magnetic(2.0, 0, 1);
    CHECK_THROWS_AS(f.potential_at(FourVector(1.0, 0.0)), ConfigurationError);
    const FourVector x(0.5, -1.0, 0.2);
    const auto a = f.potential_at(x);
    CHECK(a.spatial(0) == doctest::Approx(2.0));  // A_x = -B y = 2
    CHECK(a.spatial(1) == doctest::Approx(0.0));
    const auto t = f.field_tensor_at(x);
    CHECK(t(0, 1) == doctest::Approx(-2.0));
    CHECK(t(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("pure gauge potential is the gradient of chi and has F = 0") {
    const double alpha = 0.8;
    const auto f = EMPotential::pure_gauge(linear_gauge({alpha}, 0.3));
    const FourVector x(1.1, 2.2);
    const auto a = f.potential_at(x);
    CHECK(a.spatial(0) == doctest::Approx(alpha));
    CHECK(a.temporal() == doctest::Approx(-0.3));
    const auto t = f.field_tensor_at(x);
    CHECK(std::abs(t(0, 1)) < 1e-10);
    CHECK(std::abs(t(1, 0)) < 1e-10);
}

TEST_CASE("pure gauge with a sinusoidal chi still has F = 0 pointwise") {
    const auto f = EMPotential::pure_gauge(sinusoidal_gauge(0.7, {0.9}, 0.4));
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const FourVector x(rng.uniform(-3, 3), rng.uniform(-3, 3));
        const auto t = f.field_tensor_at(x);
        CHECK(std::abs(t(0, 1)) < 1e-10);
    }
}

TEST_CASE("finite-difference tensor matches the closed forms") {
    Rng rng(99);
    const auto fe = EMPotential::constant_electric(1.2, 0);
    const auto fb = EMPotential::constant_magnetic(0.8, 0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const FourVector x1(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const auto te = fe.field_tensor_at(x1);
        const auto te_fd = fe.finite_difference_tensor(x1);
        for (int i = 0; i <= 1; ++i)
            for (int j = 0; j <= 1; ++j) CHECK(std::abs(te(i, j) - te_fd(i, j)) < 1e-6);

        const FourVector x2(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        const auto tb = fb.field_tensor_at(x2);
        const auto tb_fd = fb.finite_difference_tensor(x2);
        for (int i = 0; i <= 2; ++i)
            for (int j = 0; j <= 2; ++j) CHECK(std::abs(tb(i, j) - tb_fd(i, j)) < 1e-6);
    }
}

TEST_CASE("tensors are antisymmetric for all families at random points") {
    Rng rng(123);
    const std::vector<EMPotential> fields = {
        EMPotential::zero(), EMPotential::constant_electric(0.9, 0),
        EMPotential::pure_gauge(sinusoidal_gauge(1.1, {0.5}, -0.2))};
    for (const auto& f : fields) {
        for (int trial = 0; trial < 20; ++trial) {
            const FourVector x(rng.uniform(-4, 4), rng.uniform(-4, 4));
            const auto t = f.field_tensor_at(x);
            for (int i = 0; i <= 1; ++i)
                for (int j = 0; j <= 1; ++j) CHECK(t(i, j) == doctest::Approx(-t(j, i)));
        }
    }
}
