#include <doctest.h>

#include <cmath>

#include "ma/nashmoser.hpp"

using namespace ma;

TEST_CASE("schedule arithmetic") {
    Schedule s;
    CHECK(delta_of(s) == doctest::Approx(80.0 / 3).epsilon(1e-15));
    CHECK(limit_factor(s) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(mu_of(s, 1) == std::pow(6.0, 1.6));
    s.n0 = 2;
    CHECK(mu_of(s, 3) == std::pow(6.0, std::pow(1.6, 5)));
    CHECK(domain_factor(s, 1) == 1);
    CHECK(domain_factor(s, 3) == doctest::Approx(1 - 1.0 / 6 - 1.0 / 36));
    CHECK(theta_of(s, 1) == s.theta0);
    CHECK(theta_of(s, 3) == doctest::Approx(s.theta0 / 4));
    CHECK(sigma_of(s, 0) == 0);
}

TEST_CASE("domains shrink monotonically towards the limit") {
    const Schedule s;
    const Grid2D X(-1, 1, -1, 1, 65, 65);
    double prev = 2;
    for (int n = 1; n < 30; ++n) {
        const Grid2D d = domain_sequence(s, X, n);
        CHECK(d.nx == X.nx);
        CHECK(d.x_max < prev + 1e-15);
        CHECK(d.x_max > limit_factor(s) - 1e-15);
        prev = d.x_max;
    }
    CHECK_THROWS(domain_sequence(s, X, 0));
}

TEST_CASE("cut-off is one on the inner and zero outside the outer domain") {
    const Schedule s;
    const Grid2D X(-1, 1, -1, 1, 65, 65);
    const Field phi = cutoff_phi(X, domain_sequence(s, X, 1), domain_sequence(s, X, 2));
    CHECK(phi(32, 32) == 1);
    CHECK(phi(0, 32) == 0);
    CHECK_THROWS(cutoff_phi(X, domain_sequence(s, X, 2), domain_sequence(s, X, 1)));
}

TEST_CASE("schedule validation") {
    Schedule s;
    s.mu = 5;
    CHECK_THROWS(validate(s));
    s = Schedule{};
    s.tau = 2;
    CHECK_THROWS(validate(s));
    s = Schedule{};
    s.tol = 0;
    CHECK_THROWS(validate(s));
}

TEST_CASE("oracle: exact model exits at n = 1 without a solve") {
    const ProblemSpec p = curvature_problem(builtin_K("exact", {}), 0.05, false);
    const ScaledOperator op(p, Grid2D(-1, 1, -1, 1, 65, 65));
    const RunResult r = run(op, Schedule{}, StripParams{});
    CHECK(r.status == "converged");
    CHECK(r.solves == 0);
    CHECK(r.log.size() == 1);
    CHECK(r.log[0].n == 1);
}

TEST_CASE("oracle: frozen quadratic run") {
    const ProblemSpec p = curvature_problem(builtin_K("quadratic", {1, 0, -1}), 0.05);
    const ScaledOperator op(p, Grid2D(-1, 1, -1, 1, 65, 65));
    Schedule s;
    s.tol = 1e-11;
    std::vector<nlohmann::json> lines;
    const RunResult r = run(op, s, StripParams{}, BC::dirichlet, [&](const StepRecord& x) { lines.push_back(to_json(x)); });
    CHECK(r.status == "converged");
    CHECK(r.solves == 5);
    CHECK(r.f1_norm == doctest::Approx(2.4406566647319978e-05).epsilon(1e-8));
    CHECK(r.final_norm == doctest::Approx(6.2212234918409045e-12).epsilon(1e-4));
    CHECK(r.f1_norm / r.final_norm >= 1e2);
    CHECK(r.state.fallbacks == 0);
    for (const char* k : {"n", "theta_n", "mu_n", "domain", "norm_f0", "norm_u0", "trackers", "fallback_flags", "q_norm"})
        CHECK(lines.front().contains(k));
    for (const StepRecord& x : r.log)
        if (x.stepped) {
            CHECK(x.solve_residual < 1e-9);
            CHECK(x.a12_residual < 1e-6);
            CHECK(x.jacobian_min > 0);
        }
}

TEST_CASE("max_iter caps the solves and reports a stall") {
    const ProblemSpec p = curvature_problem(builtin_K("quadratic", {1, 0, -1}), 0.05);
    const ScaledOperator op(p, Grid2D(-1, 1, -1, 1, 33, 33));
    Schedule s;
    s.tol = 1e-14;
    s.max_iter = 1;
    const RunResult r = run(op, s, StripParams{});
    CHECK(r.status == "stalled");
    CHECK(r.solves == 1);
}

TEST_CASE("trackers are diagnostics with finite ratios") {
    const ProblemSpec p = curvature_problem(builtin_K("quadratic", {1, 0, -1}), 0.05);
    const ScaledOperator op(p, Grid2D(-1, 1, -1, 1, 33, 33));
    const RunResult r = run(op, Schedule{}, StripParams{});
    for (const StepRecord& x : r.log)
        for (const TrackerEntry* e : {&x.trackers.I, &x.trackers.II, &x.trackers.III, &x.trackers.IV}) {
            CHECK(std::isfinite(e->ratio()));
            CHECK(e->order <= Schedule{}.s_track);
        }
}
