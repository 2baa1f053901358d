#include <doctest.h>

#include <cmath>

#include "ma/nashmoser.hpp"
#include "ma/verify.hpp"

using namespace ma;

TEST_CASE("reconstruct_z: w = 0 gives z0 and constants shift by eps^9") {
    const ProblemSpec p = curvature_problem(builtin_K("exact", {}), 0.1, false);
    const Grid2D X(-1, 1, -1, 1, 17, 17);
    const Field z = reconstruct_z(Field(X), p);
    CHECK(z.grid.x_max == doctest::Approx(1e-4));
    CHECK(z.grid.y_max == doctest::Approx(1e-2));
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) {
            const double u = z.grid.x(i), v = z.grid.y(j);
            CHECK(z(i, j) == doctest::Approx(u * u / 2 - v * v * v * v / 12));
        }
    const Field z1 = reconstruct_z(Field(X, 2.0), p);
    CHECK(z1(3, 5) - z(3, 5) == doctest::Approx(2e-9).epsilon(1e-6));
    // inverse map
    const Field w = Field::sample(X, [](double x, double y) { return std::sin(x + y); });
    const Field zw = reconstruct_z(w, p);
    CHECK(std::abs((zw(4, 9) - z(4, 9)) / 1e-9 - w(4, 9)) < 1e-6);
}

TEST_CASE("diff4 is exact on quartics") {
    const Grid2D g(-1, 1, -1, 1, 13, 13);
    const Field f = Field::sample(g, [](double x, double y) { return x * x * x * x - 2 * x * x * y * y + y * y * y; });
    const Field fxx = diff4(f, 2, 0), fxy = diff4(f, 1, 1);
    for (int i = 0; i < 13; ++i)
        for (int j = 0; j < 13; ++j) {
            const double x = g.x(i), y = g.y(j);
            CHECK(fxx(i, j) == doctest::Approx(12 * x * x - 4 * y * y).epsilon(1e-9));
            CHECK(fxy(i, j) == doctest::Approx(-8 * x * y).scale(1).epsilon(1e-9));
        }
}

TEST_CASE("graph curvature oracles") {
    const Grid2D g(-0.5, 0.5, -0.5, 0.5, 65, 65);
    const Field para = Field::sample(g, [](double u, double v) { return (u * u + v * v) / 2; });
    const Field K = graph_curvature(para);
    double e = 0;
    for (int i = 0; i < 65; ++i)
        for (int j = 0; j < 65; ++j) {
            const double s = 1 + g.x(i) * g.x(i) + g.y(j) * g.y(j);
            e = std::max(e, std::abs(K(i, j) - 1 / (s * s)));
        }
    CHECK(e < 1e-10);
    CHECK(sup_abs(graph_curvature(Field::sample(g, [](double u, double v) { return 2 * u - v; }))) < 1e-12);
    const Field z0 = Field::sample(g, [](double u, double v) { return u * u / 2 - v * v * v * v / 12; });
    const auto Kx = builtin_K("exact", {});
    double e0 = 0;
    const Field K0 = graph_curvature(z0);
    for (int i = 0; i < 65; ++i)
        for (int j = 0; j < 65; ++j) e0 = std::max(e0, std::abs(K0(i, j) - Kx(g.x(i), g.y(j))));
    CHECK(e0 < 1e-9);
}

TEST_CASE("flatness: flat metric with z = 0, and the pulled back graph metric") {
    const Grid2D g(-0.3, 0.3, -0.3, 0.3, 33, 33);
    const Flatness f = flatness_residual(builtin_metric("flat", {}), Field(g));
    CHECK(sup_abs(f.brioschi) < 1e-14);
    CHECK(sup_abs(f.eq) < 1e-14);
    // ds^2 = dx^2 + dy^2 + dz0^2 with z = z0 is flat after subtracting dz^2
    const Field z0 = Field::sample(g, [](double u, double v) { return u * u / 2 - v * v * v * v / 12; });
    const Flatness h = flatness_residual(builtin_metric("graph", {}), z0);
    CHECK(sup_abs(h.brioschi) < 1e-6);
    const double r = sup_abs(h.brioschi) / std::max(sup_abs(h.eq), 1e-300);
    CHECK(r < 10);
    CHECK(r > 0.1);
}

TEST_CASE("flatness rejects a gradient that breaks positivity") {
    const Grid2D g(-0.3, 0.3, -0.3, 0.3, 17, 17);
    const Field steep = Field::sample(g, [](double u, double) { return 2 * u; });
    CHECK_THROWS(flatness_residual(builtin_metric("flat", {}), steep));
}

TEST_CASE("verification of a converged run is independent of the solver") {
    const ProblemSpec p = curvature_problem(builtin_K("quadratic", {1, 0, -1}), 0.05);
    const Grid2D X(-1, 1, -1, 1, 65, 65);
    const ScaledOperator op(p, X);
    const RunResult r = run(op, Schedule{}, StripParams{});
    const VerificationReport v = verify_solution(p, r.w, limit_factor(Schedule{}));
    const double h = std::max(v.hx, v.hy);
    CHECK(v.curvature_error_scaled.sup <= 5 * (h * h + r.final_norm));
    CHECK(v.ma_residual.sup >= 0);
    CHECK(v.grid.nx == 51);
    Field bad = r.w;
    bad(32, 32) += 1e-3;
    const VerificationReport vb = verify_solution(p, bad, limit_factor(Schedule{}));
    CHECK(vb.ma_residual.sup > 100 * v.ma_residual.sup);
}
