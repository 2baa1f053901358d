#include <doctest.h>

#include <cmath>

#include "ma/smoothing.hpp"

using namespace ma;

namespace {
const double pi = 3.141592653589793;
}

TEST_CASE("hat profile has the plateau and compact support") {
    CHECK(hat_profile(0) == 1);
    CHECK(hat_profile(1) == 1);
    CHECK(hat_profile(1.5) == doctest::Approx(0.5));
    CHECK(hat_profile(2) == 0);
    CHECK(hat_profile(3) == 0);
}

TEST_CASE("mollify keeps constants and plateau modes, rejects gamma < 1") {
    const Grid2D g(-1, 1, -1, 1, 65, 65);
    CHECK(sup_abs(mollify(Field(g, 3.5), 2) - Field(g, 3.5)) < 1e-12);
    // m/(2L) cycles per unit with L = 2
    const Field f = Field::sample(g, [](double x, double y) { return std::cos(pi * 3 * (x + 1) / 2) * std::cos(pi * (y + 1) / 2); });
    CHECK(sup_abs(mollify(f, 1) - f) < 1e-10);
    CHECK_THROWS(mollify(f, 0.5));
}

TEST_CASE("mollify removes modes beyond twice gamma and is linear") {
    const Grid2D g(-1, 1, -1, 1, 65, 65);
    const Field hi = Field::sample(g, [](double x, double) { return std::cos(pi * 20 * (x + 1) / 2); });
    CHECK(sup_abs(mollify(hi, 2)) < 1e-12);
    const Field a = Field::sample(g, [](double x, double y) { return std::exp(x * y); });
    const Field s = mollify(a * 2.0 + hi, 4) - mollify(a, 4) * 2.0 - mollify(hi, 4);
    CHECK(sup_abs(s) < 1e-12);
}

TEST_CASE("mollify is bounded in L2 uniformly in gamma") {
    const Grid2D g(-1, 1, -1, 1, 65, 65);
    const Field a = Field::sample(g, [](double x, double y) { return std::abs(x) + std::sin(5 * y); });
    for (double gam : {1.0, 2.0, 4.0, 8.0, 16.0}) CHECK(l2(mollify(a, gam)) <= 2 * l2(a));
}

TEST_CASE("extension mirrors inside and tapers to zero at the outer edge") {
    const Grid2D g(-1, 1, -1, 1, 17, 17);
    const Field f = Field::sample(g, [](double x, double y) { return 1 + x + y * y; });
    const Field e = extend(f, 0.5);
    CHECK(e.grid.nx == 17 + 8);
    CHECK(e(4, 4) == f(0, 0));
    CHECK(e(3, 4) == f(1, 0));
    CHECK(e(0, 10) == 0);
    CHECK_THROWS(extend(f, 0));
    CHECK_THROWS(extend(f, 5));
}

TEST_CASE("smoothing constants are uniform and the rate is quadratic") {
    const Grid2D g(-1, 1, -1, 1, 257, 257);
    const SmoothingReport r = smoothing_constants({2, 4, 8, 16}, smoothing_probes(g));
    CHECK(r.pass);
    CHECK(r.rate_slope >= 1.6);
    CHECK(r.rate_slope <= 2.4);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b <= a; ++b) CHECK(r.spread[a][b] < 2);
}

TEST_CASE("zero probes are skipped") {
    const Grid2D g(-1, 1, -1, 1, 33, 33);
    const SmoothingReport r = smoothing_constants({2, 4}, {Field(g)});
    CHECK(r.c[0][0][0] == 0);
    CHECK(r.rate[1] == 0);
}

TEST_CASE("log-log slope of a power law") {
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2));
}
