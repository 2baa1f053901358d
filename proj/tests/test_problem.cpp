#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "ma/problem.hpp"

using namespace ma;

TEST_CASE("hypotheses: quadratic saddle accepted, definite or nonzero rejected") {
    CHECK(check_hypotheses(builtin_K("quadratic", {1, 0, -1})).accepted);
    CHECK(check_hypotheses(builtin_K("quadratic", {-1, 0, -2})).accepted);
    CHECK_FALSE(check_hypotheses(builtin_K("quadratic", {1, 0, 2})).accepted);
    CHECK_FALSE(check_hypotheses(builtin_K("linear", {1, 0})).accepted);
    CHECK_FALSE(check_hypotheses([](double, double) { return 1e-3; }).accepted);
    CHECK_THROWS(curvature_problem(builtin_K("quadratic", {1, 0, 2}), 0.05));
    CHECK_THROWS(builtin_K("quadratic", {1, 0}));
    CHECK_THROWS(builtin_K("nosuch", {}));
}

TEST_CASE("normalization makes the quadratic part -v^2 + c u^2") {
    const auto K = builtin_K("quadratic", {2, 1, -3});
    const ProblemSpec p = curvature_problem(K, 0.05);
    const Eigen::Matrix2d H = hessian_at_origin(p.K);
    CHECK(H(1, 1) == doctest::Approx(-2).epsilon(1e-8));
    CHECK(std::abs(H(0, 1)) < 1e-8);
    CHECK(p.norm.zscale == doctest::Approx(std::abs(p.norm.A.determinant())));
}

TEST_CASE("smoothstep and cutoff profile") {
    CHECK(smoothstep(-1) == 0);
    CHECK(smoothstep(2) == 1);
    CHECK(smoothstep(0.5) == doctest::Approx(0.5));
    CHECK(cutoff1d(0.4, 0.5, 0.75) == 1);
    CHECK(cutoff1d(-0.8, 0.5, 0.75) == 0);
}

TEST_CASE("oracle: exact model has zero residual at w = 0") {
    const ProblemSpec p = curvature_problem(builtin_K("exact", {}), 0.05, false);
    const Grid2D X(-1, 1, -1, 1, 33, 33);
    const ScaledOperator op(p, X);
    CHECK(sup_abs(op.phi_apply(Field(X))) < 1e-9);
}

TEST_CASE("oracle: phi of the quadratic problem at w = 0 is frozen") {
    const ProblemSpec p = curvature_problem(builtin_K("quadratic", {1, 0, -1}), 0.05);
    const Grid2D X(-1, 1, -1, 1, 65, 65);
    const ScaledOperator op(p, X);
    const Field f = op.phi_apply(Field(X));
    CHECK(l2(f) == doctest::Approx(2.4406566647319995e-05).epsilon(1e-9));
}

TEST_CASE("linearization matches a difference quotient") {
    const ProblemSpec p = curvature_problem(builtin_K("quadratic", {1, 0, -1}), 0.05);
    const Grid2D X(-1, 1, -1, 1, 33, 33);
    const ScaledOperator op(p, X);
    const Field w = Field::sample(X, [](double x, double y) { return 0.3 * std::cos(x) * std::sin(2 * y); });
    const Field v = Field::sample(X, [](double x, double y) { return std::exp(-x * x - y * y); });
    const Field Lv = apply_operator(op.linearize(w), v);
    const double h = 1e-4;
    const Field q = (op.phi_apply(w + v * h) - op.phi_apply(w - v * h)) * (0.5 / h);
    CHECK(sup_abs(q - Lv) < 1e-6 * (1 + sup_abs(Lv)));
}

TEST_CASE("linearization at w = 0 is the Gallerstedt operator inside the cut-off") {
    const ProblemSpec p = curvature_problem(builtin_K("quadratic", {1, 0, -1}), 0.05);
    const Grid2D X(-1, 1, -1, 1, 33, 33);
    const ScaledOperator op(p, X);
    const CoefficientSet c = op.linearize(Field(X));
    const int i = 16, j = 20;
    CHECK(c.a11(i, j) == doctest::Approx(-X.y(j) * X.y(j)).epsilon(1e-3));
    CHECK(c.a22(i, j) == doctest::Approx(1).epsilon(1e-3));
    CHECK(std::abs(c.a12(i, j)) < 1e-3);
}

TEST_CASE("metric geometry: Brioschi and Christoffels of simple metrics") {
    const MetricSpec flat = builtin_metric("flat", {});
    CHECK(brioschi(metric_jet(flat, 0.3, -0.2)) == doctest::Approx(0));
    const MetricSpec e = builtin_metric("exp_u", {});
    // du^2 + e^{2u} dv^2 has K = -1
    CHECK(brioschi(metric_jet(e, 0.1, 0.4)) == doctest::Approx(-1).epsilon(1e-12));
    const Geometry g = geometry_from_jet(metric_jet(e, 0.2, 0));
    CHECK(g.gam[0][2] == doctest::Approx(-std::exp(0.4)).epsilon(1e-12));
    CHECK(g.gam[1][1] == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("embedding problem normalizes the saddle metric") {
    const ProblemSpec p = metric_to_problem(builtin_metric("graph_warped", {}), 0.05);
    const Geometry g = p.geom(0, 0);
    CHECK(g.E * g.G - g.F * g.F > 0);
    const Eigen::Matrix2d H = hessian_at_origin(p.K);
    CHECK(H(1, 1) == doctest::Approx(-2).epsilon(1e-5));
    CHECK_THROWS(metric_to_problem(builtin_metric("exp_u", {}), 0.05));
}
