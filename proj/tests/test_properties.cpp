#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ma/charcoords.hpp"
#include "ma/config.hpp"
#include "ma/smoothing.hpp"
#include "ma/verify.hpp"

using namespace ma;

namespace {

Field random_field(const Grid2D& g, std::mt19937_64& rng, int modes = 5) {
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> c(4 * modes);
    for (double& x : c) x = U(rng);
    return Field::sample(g, [&](double x, double y) {
        double s = 0;
        for (int k = 0; k < modes; ++k) s += c[4 * k] * std::sin((k + 1) * c[4 * k + 1] * 3 * x + c[4 * k + 2] * 2 * y + c[4 * k + 3]);
        return s;
    });
}

}  // namespace

TEST_CASE("property: diff is linear and mixed derivatives commute") {
    std::mt19937_64 rng(11);
    const Grid2D g(-1, 1, -0.5, 0.5, 33, 17);
    for (int t = 0; t < 20; ++t) {
        const Field a = random_field(g, rng), b = random_field(g, rng);
        CHECK(sup_abs(diff(a * 2.0 + b, 1, 1) - diff(a, 1, 1) * 2.0 - diff(b, 1, 1)) < 1e-11);
        CHECK(sup_abs(diff(diff(a, 1, 0), 0, 1) - diff(diff(a, 0, 1), 1, 0)) < 1e-10);
    }
}

TEST_CASE("property: field files round trip for random grids") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> N(9, 40);
    const auto p = std::filesystem::temp_directory_path() / "ma_prop.field";
    for (int t = 0; t < 10; ++t) {
        const Grid2D g(-1.5, 0.25, -2, 3, N(rng), N(rng));
        const Field f = random_field(g, rng);
        write_field(p.string(), f);
        const Field h = read_field(p.string());
        CHECK(h.grid == g);
        CHECK(h.v == f.v);
    }
}

TEST_CASE("property: mollify is linear, contracts L2 and fixes its own low band") {
    std::mt19937_64 rng(13);
    const Grid2D g(-1, 1, -1, 1, 65, 65);
    for (int t = 0; t < 10; ++t) {
        const Field a = random_field(g, rng, 8), b = random_field(g, rng, 8);
        const double gam = 1 + 15 * std::uniform_real_distribution<double>(0, 1)(rng);
        CHECK(sup_abs(mollify(a + b, gam) - mollify(a, gam) - mollify(b, gam)) < 1e-12);
        CHECK(l2(mollify(a, gam)) <= l2(a) * (1 + 1e-12));
        // S_{4 gamma} S_gamma = S_gamma since the support of S_gamma lies in the plateau of S_{4 gamma}
        const Field s = mollify(a, gam);
        CHECK(sup_abs(mollify(s, 4 * gam) - s) < 1e-12);
    }
}

TEST_CASE("property: characteristics stay monotone for random small mixed coefficients") {
    std::mt19937_64 rng(14);
    const Grid2D X(-1, 1, -1, 1, 65, 65);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int t = 0; t < 10; ++t) {
        CoefficientSet c = zero_coeffs(X);
        c.a11 = Field::sample(X, [](double, double y) { return -y * y; });
        c.a22 = Field(X, 1.0);
        const double e = 0.01 * U(rng), cx = 0.3 * U(rng), cy = 0.3 * U(rng);
        c.a12 = Field::sample(X, [&](double x, double y) {
            const double r = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / 0.25;
            return r < 1 ? e * std::exp(1 - 1 / (1 - r)) : 0.0;
        });
        const DiffeoMap m = build_characteristics(c);
        CHECK(m.jacobian_min > 0);
        for (int j = 0; j < X.ny; ++j)
            for (int i = 1; i < X.nx; ++i) CHECK(m.xi(i, j) > m.xi(i - 1, j));
        CHECK(pushforward(c, m).a12_residual < 1e-5);
    }
}

TEST_CASE("property: graph curvature is invariant under adding planes when the gradient is small") {
    std::mt19937_64 rng(15);
    const Grid2D g(-0.01, 0.01, -0.01, 0.01, 33, 33);
    for (int t = 0; t < 5; ++t) {
        const Field z = random_field(g, rng) * 1e-3;
        const Field K = graph_curvature(z);
        const Field Kp = graph_curvature(z + Field::sample(g, [](double u, double v) { return 1e-3 * (u - v); }));
        CHECK(sup_abs(K - Kp) <= 1e-4 * (1 + sup_abs(K)));
    }
}

TEST_CASE("property: config round trip for random numeric settings") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> U(0, 1);
    for (int t = 0; t < 20; ++t) {
        RunConfig c;
        c.epsilon = 0.01 + 0.3 * U(rng);
        c.schedule.mu = 5.5 + 3 * U(rng);
        c.schedule.tau = 1.55 + 0.4 * U(rng);
        c.schedule.tol = std::pow(10, -12 * U(rng));
        c.K_coeffs = {U(rng), U(rng), -U(rng)};
        c.seed = rng();
        const RunConfig d = parse_config(to_text(c));
        CHECK(d.epsilon == c.epsilon);
        CHECK(d.schedule.tau == c.schedule.tau);
        CHECK(d.schedule.tol == c.schedule.tol);
        CHECK(d.K_coeffs == c.K_coeffs);
        CHECK(to_text(d) == to_text(c));
    }
}
