#include <doctest.h>

#include <initializer_list>

#include <cmath>

#include "spherelab/bessel.hpp"

using spherelab::bessel_j;

TEST_SUITE_BEGIN("bessel");

TEST_CASE("matches the standard library across the supported orders") {
    const double orders[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    for (double nu : orders) {
        for (double x = 1e-3; x <= 1000.0; x *= 1.35) {
            const double ref = std::cyl_bessel_j(nu, x);
            CHECK(std::abs(bessel_j(nu, x) - ref) <= 1e-10);
        }
    }
}

TEST_CASE("values at zero") {
    CHECK(bessel_j(0.0, 0.0) == 1.0);
    CHECK(bessel_j(1.0, 0.0) == 0.0);
    CHECK(bessel_j(2.5, 0.0) == 0.0);
}

TEST_CASE("continuity across the crossover") {
    const double x0 = spherelab::bessel_j_crossover();
    for (double nu : {0.0, 1.0, 1.5, 2.0}) {
        const double below = bessel_j(nu, x0 - 1e-9);
        const double above = bessel_j(nu, x0 + 1e-9);
        CHECK(std::abs(below - above) <= 1e-9);
    }
}

TEST_CASE("rejects unsupported input") {
    CHECK_THROWS(bessel_j(4.0, 1.0));
    CHECK_THROWS(bessel_j(-1.0, 1.0));
    CHECK_THROWS(bessel_j(1.0, -2.0));
}

TEST_SUITE_END();
