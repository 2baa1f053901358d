#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ma/estimates.hpp"
#include "ma/linsolve.hpp"

using namespace ma;

namespace {

CoefficientSet laplace(const Grid2D& g) {
    CoefficientSet c = zero_coeffs(g);
    c.a11 = Field(g, 1.0);
    c.a22 = Field(g, 1.0);
    return c;
}

}  // namespace

TEST_CASE("assembly rejects a nonpositive regularization") {
    const Grid2D g(-1, 1, -1, 1, 17, 17);
    CHECK_THROWS(assemble(laplace(g), 0.0, BC::dirichlet));
}

TEST_CASE("manufactured solution of the regularized Laplacian converges at second order") {
    const double pi = 3.141592653589793, th = 1e-3;
    double e[2];
    int k = 0;
    for (int n : {33, 65}) {
        const Grid2D g(-1, 1, -1, 1, n, n);
        const Field u = Field::sample(g, [&](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
        // u_xx + u_yy - th u_xxyy
        const Field f = u * (-2 * pi * pi - th * pi * pi * pi * pi);
        const SolveResult s = solve(assemble(laplace(g), th, BC::dirichlet), f);
        CHECK_FALSE(s.fallback);
        CHECK(s.rel_residual < 1e-10);
        e[k++] = sup_abs(s.u - u);
    }
    CHECK(e[1] < 2e-3);
    CHECK(std::log2(e[0] / e[1]) > 1.8);
}

TEST_CASE("matrix application agrees with the solve") {
    const Grid2D g(-1, 1, -1, 1, 17, 17);
    const LinearSystem sys = assemble(laplace(g), 1e-2, BC::neumann_x);
    const Field f = Field::sample(g, [](double x, double y) { return std::exp(-4 * (x * x + y * y)); });
    const SolveResult s = solve(sys, f);
    Field r = apply_matrix(sys, s.u);
    double m = 0;
    for (std::size_t q = 0; q < sys.node.size(); ++q)
        if (!sys.edge_row[q]) m = std::max(m, std::abs(r.v[sys.node[q]] - f.v[sys.node[q]]));
    CHECK(m < 1e-10);
}

TEST_CASE("matrix dump writes one triplet per nonzero") {
    const Grid2D g(-1, 1, -1, 1, 9, 9);
    const LinearSystem sys = assemble(laplace(g), 1e-2, BC::dirichlet);
    const auto p = std::filesystem::temp_directory_path() / "ma_matrix_dump.txt";
    dump_matrix(sys, p.string());
    std::ifstream in(p);
    int rows = 0;
    long r, c;
    double v;
    while (in >> r >> c >> v) ++rows;
    CHECK(rows == sys.matrix.nonZeros());
}

TEST_CASE("tame diagnostic is grid stable on the model strip") {
    const TameReport a = model_tame(Grid2D(-1, 1, -1, 1, 17, 33), StripParams{}, 1e-2, 2);
    const TameReport b = model_tame(Grid2D(-1, 1, -1, 1, 33, 65), StripParams{}, 1e-2, 2);
    CHECK(a.c_s > 0);
    CHECK(b.c_s / a.c_s < 2);
    CHECK(b.c_s / a.c_s > 0.5);
    CHECK_THROWS(model_tame(Grid2D(-1, 1, -1, 1, 17, 33), StripParams{}, 1e-2, 5));
}
