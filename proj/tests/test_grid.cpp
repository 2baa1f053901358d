#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "ma/grid.hpp"

using namespace ma;

TEST_CASE("grid rejects degenerate rectangles and tiny node counts") {
    CHECK_THROWS_AS(Grid2D(1, -1, -1, 1, 9, 9), std::invalid_argument);
    CHECK_THROWS_AS(Grid2D(-1, 1, -1, 1, 4, 9), std::invalid_argument);
    const Grid2D g(-1, 1, -2, 2, 9, 17);
    CHECK(g.hx() == doctest::Approx(0.25));
    CHECK(g.hy() == doctest::Approx(0.25));
    CHECK(g.x(8) == 1.0);
    CHECK(g.y(16) == 2.0);
}

TEST_CASE("field layout is row-major with y fastest") {
    const Grid2D g(0, 1, 0, 1, 9, 11);
    Field f(g);
    f(2, 3) = 7;
    CHECK(f.v[2 * 11 + 3] == 7);
}

TEST_CASE("diff is exact on quadratics in the interior and at edges") {
    const Grid2D g(-1, 1, -1, 1, 17, 17);
    const Field f = Field::sample(g, [](double x, double y) { return 3 * x * x - 2 * x * y + y * y + x - 4; });
    const Field fx = diff(f, 1, 0), fyy = diff(f, 0, 2), fxy = diff(f, 1, 1);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            CHECK(fx(i, j) == doctest::Approx(6 * g.x(i) - 2 * g.y(j) + 1).epsilon(1e-10));
            CHECK(fyy(i, j) == doctest::Approx(2).epsilon(1e-10));
            CHECK(fxy(i, j) == doctest::Approx(-2).epsilon(1e-10));
        }
}

TEST_CASE("diff converges at second order") {
    double e[2];
    int k = 0;
    for (int n : {33, 65}) {
        const Grid2D g(-1, 1, -1, 1, n, n);
        const Field f = Field::sample(g, [](double x, double y) { return std::sin(2 * x) * std::cos(y); });
        const Field d = diff(f, 2, 0);
        double m = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m = std::max(m, std::abs(d(i, j) + 4 * std::sin(2 * g.x(i)) * std::cos(g.y(j))));
        e[k++] = m;
    }
    CHECK(std::log2(e[0] / e[1]) > 1.8);
}

TEST_CASE("fornberg reproduces the classical central weights") {
    const auto w = fornberg(2, 0, {-1, 0, 1});
    CHECK(w[0] == doctest::Approx(1));
    CHECK(w[1] == doctest::Approx(-2));
    CHECK(w[2] == doctest::Approx(1));
    const auto w4 = fornberg(1, 0, {-2, -1, 0, 1, 2});
    CHECK(w4[0] == doctest::Approx(1.0 / 12));
    CHECK(w4[1] == doctest::Approx(-2.0 / 3));
    CHECK(w4[3] == doctest::Approx(2.0 / 3));
}

TEST_CASE("norms of a constant and of a sine") {
    const Grid2D g(0, 1, 0, 1, 65, 65);
    const NormReport c = norms(Field(g, 2.0), 2);
    CHECK(c.l2 == doctest::Approx(2).epsilon(1e-12));
    CHECK(c.sobolev.at(2) == doctest::Approx(2).epsilon(1e-12));
    const double pi = 3.141592653589793;
    const Field s = Field::sample(g, [&](double x, double) { return std::sin(pi * x); });
    const NormReport r = norms(s, 1);
    CHECK(r.l2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
    CHECK(r.sobolev.at(1) == doctest::Approx(std::sqrt(0.5 + 0.5 * pi * pi)).epsilon(2e-3));
    CHECK_THROWS(norms(s, 5));
}

TEST_CASE("sobolev norms are monotone in the order") {
    const Grid2D g(-1, 1, -1, 1, 33, 33);
    const Field f = Field::sample(g, [](double x, double y) { return std::exp(x) * std::cos(3 * y); });
    const NormReport r = norms(f, 4);
    for (int s = 1; s <= 4; ++s) CHECK(r.sobolev.at(s) >= r.sobolev.at(s - 1));
}

TEST_CASE("inner block and restriction select centred sub-rectangles") {
    const Grid2D g(-1, 1, -1, 1, 65, 65);
    const Block b = inner_block(g, 0.5, 0.5);
    CHECK(b.i0 == 16);
    CHECK(b.i1 == 48);
    const Grid2D s = block_grid(g, b);
    CHECK(s.x_min == doctest::Approx(-0.5));
    CHECK(s.nx == 33);
    const Field f = Field::sample(g, [](double x, double y) { return x + 2 * y; });
    const Field e = extract(f, b);
    CHECK(e(0, 0) == doctest::Approx(-1.5));
    const Field r = restrict_to(f, Grid2D(-0.5, 0.5, -0.5, 0.5, 21, 21));
    CHECK(r(20, 20) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("field files round trip bit for bit") {
    const Grid2D g(-1, 2, -0.5, 0.25, 9, 13);
    const Field f = Field::sample(g, [](double x, double y) { return std::sin(x * 7.1) / (1 + y * y) + 1e-300; });
    const auto p = std::filesystem::temp_directory_path() / "ma_grid_roundtrip.field";
    write_field(p.string(), f);
    const Field h = read_field(p.string());
    CHECK(h.grid == g);
    CHECK(h.v == f.v);
    std::FILE* fp = std::fopen(p.string().c_str(), "w");
    std::fputs("9 9 0 1 0 1\n1\n2\n", fp);
    std::fclose(fp);
    CHECK_THROWS(read_field(p.string()));
}
