#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sbmlab/oracles.hpp"
#include "sbmlab/spectral.hpp"

using namespace sbmlab;
using namespace sbmlab::spectral;

TEST_CASE("density closed form and normalization") {
    SemicircleBulk unit(1.0);
    CHECK(density(unit, 0.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
    CHECK(density(unit, 2.0) == 0.0);
    CHECK(density(SemicircleBulk(0.5), 3.0) == 0.0);

    for (double s : {0.1, 1.0, 10.0}) {
        const double mass =
            oracles::semicircle_expectation(s, [](double) { return 1.0; });
        CHECK(std::abs(mass - 1.0) < 1e-8);
        // the quadrature uses the same density: also integrate it directly
        SemicircleBulk b(s);
        const int n = 200000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double lam = -2.0 * s + 4.0 * s * (i + 0.5) / n;
            acc += density(b, lam) * 4.0 * s / n;
        }
        CHECK(std::abs(acc - 1.0) < 1e-4);  // midpoint rule, sqrt edges
    }
}

TEST_CASE("stieltjes transform values and asymptotes") {
    SemicircleBulk unit(1.0);
    CHECK(stieltjes_g(unit, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(stieltjes_g(unit, 100.0) - 0.01) < 1e-3);
    CHECK_THROWS_AS(stieltjes_g(unit, 1.5), std::domain_error);

    SemicircleBulk b(1.0 / std::sqrt(1.5));
    const double z = inverse_stieltjes(b, 0.6404);
    CHECK(stieltjes_g(b, z) == doctest::Approx(0.6404).epsilon(1e-12));
}

TEST_CASE("F: value, derivative, quadrature oracle") {
    SemicircleBulk unit(1.0);
    CHECK(stieltjes_f(unit, 2.0) == doctest::Approx(0.5).epsilon(1e-14));

    const double h = 1e-4;
    const double fd = (stieltjes_f(unit, 3.0 + h) - stieltjes_f(unit, 3.0 - h)) / (2.0 * h);
    CHECK(std::abs(fd - stieltjes_g(unit, 3.0)) < 1e-6);

    const double z = 2.5;
    const double quad =
        oracles::semicircle_expectation(1.0, [&](double l) { return std::log(z - l); });
    CHECK(std::abs(stieltjes_f(unit, z) - quad) < 1e-8);
    CHECK(stieltjes_f(unit, z) >= std::log(z) - 1.0);
}

TEST_CASE("B: values and quadrature oracle") {
    SemicircleBulk unit(1.0);
    CHECK(stieltjes_b(unit, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(stieltjes_b(unit, 100.0)) < 3e-4);

    SemicircleBulk b(0.7);
    const double z = 3.0;
    const double quad =
        oracles::semicircle_expectation(0.7, [&](double l) { return l / (z - l); });
    CHECK(std::abs(stieltjes_b(b, z) - quad) < 1e-6);
}

TEST_CASE("inverse stieltjes") {
    SemicircleBulk unit(1.0);
    CHECK(inverse_stieltjes(unit, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(inverse_stieltjes(unit, 0.5) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(stieltjes_g(unit, 2.5) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK_THROWS_AS(inverse_stieltjes(SemicircleBulk(2.0), 0.6), std::domain_error);
}

TEST_CASE("round trip and identities at random points") {
    std::mt19937 gen(42);
    for (double s : {0.3, 1.0, 2.5}) {
        SemicircleBulk b(s);
        std::uniform_real_distribution<double> ua(1e-6, 1.0 / s);
        for (int i = 0; i < 50; ++i) {
            const double a = ua(gen);
            CHECK(std::abs(stieltjes_g(b, inverse_stieltjes(b, a)) - a) < 1e-12);
        }
        std::uniform_real_distribution<double> uz(2.0 * s * 1.001, 10.0 * s);
        for (int i = 0; i < 20; ++i) {
            const double z = uz(gen);
            const double h = 1e-5 * s;
            const double fd = (stieltjes_f(b, z + h) - stieltjes_f(b, z - h)) / (2.0 * h);
            CHECK(std::abs(fd / stieltjes_g(b, z) - 1.0) < 1e-5);
            CHECK(stieltjes_b(b, z) == doctest::Approx(z * stieltjes_g(b, z) - 1.0).epsilon(1e-14));
        }
    }
}
