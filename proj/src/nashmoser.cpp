#include "ma/nashmoser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ma/smoothing.hpp"

namespace ma {

void validate(const Schedule& s) {
    if (!(s.mu > 5)) throw std::invalid_argument("schedule: mu must exceed 5");
    if (!(s.tau > 1.5 && s.tau < 2)) throw std::invalid_argument("schedule: tau must lie in (3/2, 2)");
    if (s.n0 < 0) throw std::invalid_argument("schedule: n0 must be nonnegative");
    if (!(s.theta0 > 0)) throw std::invalid_argument("schedule: theta0 must be positive");
    if (!(s.theta_decay > 0 && s.theta_decay < 1)) throw std::invalid_argument("schedule: theta_decay must lie in (0,1)");
    if (s.max_iter < 0) throw std::invalid_argument("schedule: max_iter must be nonnegative");
    if (s.s_track < 0 || s.s_track > 4) throw std::invalid_argument("schedule: s_track must lie in [0,4]");
    if (!(s.tol > 0)) throw std::invalid_argument("schedule: tol must be positive");
}

double delta_of(const Schedule& s) { return 16 / (s.tau - 1); }

double sigma_of(const Schedule& s, int n) { return n * (n + 1.0) * std::pow(s.tau, -(n + 1.0 + s.n0)); }

double mu_of(const Schedule& s, int n) { return std::pow(s.mu, std::pow(s.tau, double(n + s.n0))); }

double theta_of(const Schedule& s, int n) { return s.theta0 * std::pow(s.theta_decay, n - 1); }

double domain_factor(const Schedule& s, int n) {
    double sum = 0;
    for (int i = 1; i <= n - 1; ++i) sum += std::pow(s.mu, -i);
    return 1 - sum;
}

double limit_factor(const Schedule& s) { return 1 - 1 / (s.mu - 1); }

Grid2D domain_sequence(const Schedule& s, const Grid2D& X, int n) {
    if (n < 1) throw std::invalid_argument("domain_sequence: n must be at least 1");
    const double f = domain_factor(s, n);
    const double xc = 0.5 * (X.x_min + X.x_max), yc = 0.5 * (X.y_min + X.y_max);
    return Grid2D(xc + f * (X.x_min - xc), xc + f * (X.x_max - xc), yc + f * (X.y_min - yc), yc + f * (X.y_max - yc), X.nx, X.ny);
}

Block domain_block(const Schedule& s, const Grid2D& X, int n) {
    const double f = domain_factor(s, n);
    return inner_block(X, 0.5 * f * (X.x_max - X.x_min), 0.5 * f * (X.y_max - X.y_min));
}

Field cutoff_phi(const Grid2D& X, const Grid2D& Xn, const Grid2D& Xn1) {
    const double xc = 0.5 * (X.x_min + X.x_max), yc = 0.5 * (X.y_min + X.y_max);
    const double ax = 0.5 * (Xn1.x_max - Xn1.x_min), bx = 0.5 * (Xn.x_max - Xn.x_min);
    const double ay = 0.5 * (Xn1.y_max - Xn1.y_min), by = 0.5 * (Xn.y_max - Xn.y_min);
    if (!(ax < bx && ay < by)) throw std::invalid_argument("cutoff_phi: X_{n+1} must lie inside X_n");
    return Field::sample(X, [&](double x, double y) { return cutoff1d(x - xc, ax, bx) * cutoff1d(y - yc, ay, by); });
}

namespace {

double sob(const Field& f, const Block& b, int s) {
    if (f.v.empty()) return 0;
    return norms(extract(f, b), s).sobolev.at(s);
}

Field embed(const Field& part, const Grid2D& X, const Block& b) {
    Field r(X);
    for (int i = b.i0; i <= b.i1; ++i)
        for (int j = b.j0; j <= b.j1; ++j) r(i, j) = part(i - b.i0, j - b.j0);
    return r;
}

}  // namespace

TrackerReport trackers(const IterationState& st, const Schedule& s, const Grid2D& X, TrackerConstants& tc) {
    const int j = st.n, k = s.s_track;
    const double d = delta_of(s);
    // exponent index at which the f and u bounds are scale free
    const double sp = s.s_star - 18 - 2 * d;
    const Block bj = domain_block(s, X, j);
    TrackerReport r;
    if (j == 1) {
        tc.base = sob(st.f, bj, std::min(std::max(s.s_star - 15, 0), k));
        tc.C1 = tc.C2 = mu_of(s, 1);
        tc.C3 = mu_of(s, 1) * tc.base;
    }
    const double mj = mu_of(s, j);
    r.I.order = k;
    r.I.lhs = sob(st.w, bj, k);
    r.I.rhs = std::pow(mj, sigma_of(s, j) * sp + d) * tc.base;
    r.II.order = k;
    if (j > 1) {
        r.II.lhs = sob(st.u_prev, domain_block(s, X, j - 1), k);
        r.II.rhs = tc.C1 * std::pow(mu_of(s, j - 1), (sp - s.s_star + 18 + 2 * d) / s.tau) * tc.base;
    }
    r.III.order = k;
    r.III.lhs = sob(st.f, bj, k);
    r.III.rhs = tc.C2 * std::pow(mj, (sp - s.s_star + 18 + 2 * d) / s.tau) * tc.base;
    r.IV.order = std::min(14, k);
    r.IV.lhs = sob(st.w, bj, r.IV.order);
    r.IV.rhs = tc.C3;
    for (TrackerEntry* e : {&r.I, &r.II, &r.III, &r.IV}) {
        e->rhs = std::min(e->rhs, std::numeric_limits<double>::max());
        e->satisfied = e->lhs <= e->rhs;
    }
    return r;
}

IterationState initial_state(const ScaledOperator& op, const Schedule& s) {
    validate(s);
    IterationState st;
    st.n = 1;
    st.w = Field(op.grid());
    st.f = op.phi_apply(st.w) * -1.0;
    st.theta = theta_of(s, 1);
    st.mu_n = mu_of(s, 1);
    st.lam = 1;
    st.domain = op.grid();
    return st;
}

StepRecord step(IterationState& st, const Schedule& s, const StripParams& sp0, const ScaledOperator& op, BC bc) {
    const Grid2D& X = op.grid();
    const int n = st.n;
    const Block bn = domain_block(s, X, n), bn1 = domain_block(s, X, n + 1);
    StepRecord rec;
    rec.n = n;
    rec.theta = st.theta;
    rec.mu_n = st.mu_n;
    rec.lam = st.lam;
    rec.domain = st.domain;
    rec.norm_f0 = l2_on(st.f, bn1);
    rec.trackers = st.trackers;
    rec.stepped = true;

    const CoefficientSet c = op.linearize(st.w);
    const DiffeoMap map = build_characteristics(c);
    const PushResult push = pushforward(c, map);
    rec.a12_residual = push.a12_residual;
    rec.jacobian_min = map.jacobian_min;
    StripParams sp = sp0;
    sp.theta = st.theta;
    StripLayout L;
    const CoefficientSet strip = extend_to_strip(push.c, sp, &L);
    const LinearSystem sys = assemble(strip, st.theta, bc);

    const Field phi = cutoff_phi(X, domain_sequence(s, X, n), domain_sequence(s, X, n + 1));
    const Field target = mul(phi, st.f);
    auto d4 = [&](const Field& g) { return pullback_solution(diff(push_field(g, map), 2, 2), map); };
    auto solve_x = [&](const Field& g) {
        const Field gx = push_field(g, map);
        Field rhs(L.grid);
        for (int i = 0; i < X.nx; ++i)
            for (int j = 0; j < X.ny; ++j) rhs(i, j + L.j_off) = gx(i, j);
        const SolveResult sol = solve(sys, rhs);
        rec.solve_residual = std::max(rec.solve_residual, sol.rel_residual);
        rec.fallback = rec.fallback || sol.fallback;
        Field V(X);
        for (int i = 0; i < X.nx; ++i)
            for (int j = 0; j < X.ny; ++j) V(i, j) = sol.u(i, j + L.j_off);
        return pullback_solution(V, map);
    };
    const Field u = solve_x(target);
    if (rec.fallback) ++st.fallbacks;
    rec.fallback_flags = st.fallbacks;

    const Field Su = embed(mollify(extract(u, bn), st.mu_n), X, bn);
    Field d = embed(extract(u, bn), X, bn) - Su;

    // S u on X_n, u outside
    const Field inc = u - d;
    Field w_next = st.w + inc;
    Field f_next = op.phi_apply(w_next) * -1.0;

    // Q = f_{n+1} - L_theta (u - S u) + theta (S u)_xixietaeta
    const Field Ld = apply_operator(c, d) - d4(d) * st.theta;
    const Field Q = f_next - Ld + d4(inc) * st.theta;
    const Field T = f_next - st.f + apply_operator(c, inc);
    const Field E = st.f - apply_operator(c, u) + d4(u) * st.theta;

    rec.norm_u0 = l2_on(u, bn);
    rec.norm_su0 = l2_on(Su, bn);
    rec.norm_dw0 = l2_on(w_next - st.w, bn1);
    rec.q_norm = l2_on(Q, bn1);
    rec.q_taylor = l2_on(T, bn1);
    rec.solve_mismatch = l2_on(E, bn1);
    rec.norm_su2 = sob(Su, bn, 2);
    rec.norm_f_next = l2_on(f_next, domain_block(s, X, n + 2));

    st.n = n + 1;
    st.w = std::move(w_next);
    st.f = std::move(f_next);
    st.theta = theta_of(s, st.n);
    st.mu_n = mu_of(s, st.n);
    st.lam = domain_factor(s, st.n);
    st.domain = domain_sequence(s, X, st.n);
    st.u_prev = u;
    return rec;
}

nlohmann::json to_json(const StepRecord& r) {
    using nlohmann::json;
    auto tj = [](const TrackerEntry& e) {
        return json{{"lhs", e.lhs}, {"rhs", e.rhs}, {"ratio", e.ratio()}, {"satisfied", e.satisfied}, {"order", e.order}};
    };
    json j;
    j["n"] = r.n;
    j["theta_n"] = r.theta;
    j["mu_n"] = r.mu_n;
    j["domain"] = {{"x_min", r.domain.x_min}, {"x_max", r.domain.x_max}, {"y_min", r.domain.y_min},
                   {"y_max", r.domain.y_max}, {"nx", r.domain.nx},       {"ny", r.domain.ny},
                   {"factor", r.lam}};
    j["norm_f0"] = r.norm_f0;
    j["norm_u0"] = r.stepped ? json(r.norm_u0) : json(nullptr);
    j["trackers"] = {{"I", tj(r.trackers.I)}, {"II", tj(r.trackers.II)}, {"III", tj(r.trackers.III)}, {"IV", tj(r.trackers.IV)}};
    j["fallback_flags"] = r.fallback_flags;
    j["q_norm"] = r.stepped ? json(r.q_norm) : json(nullptr);
    if (r.stepped) {
        j["norm_su0"] = r.norm_su0;
        j["norm_su2"] = r.norm_su2;
        j["q_taylor"] = r.q_taylor;
        j["solve_mismatch"] = r.solve_mismatch;
        j["norm_f_next"] = r.norm_f_next;
        j["solve_residual"] = r.solve_residual;
        j["a12_residual"] = r.a12_residual;
        j["jacobian_min"] = r.jacobian_min;
    }
    return j;
}

RunResult run(const ScaledOperator& op, const Schedule& s, const StripParams& sp, BC bc,
              const std::function<void(const StepRecord&)>& on_record) {
    const Grid2D& X = op.grid();
    RunResult res;
    TrackerConstants tc;
    IterationState st = initial_state(op, s);
    std::vector<double> hist;
    auto emit = [&](const StepRecord& r) {
        res.log.push_back(r);
        if (on_record) on_record(r);
    };
    try {
        for (;;) {
            st.trackers = trackers(st, s, X, tc);
            const double r = l2_on(st.f, domain_block(s, X, st.n + 1));
            if (st.n == 1) res.f1_norm = r;
            hist.push_back(r);
            res.final_norm = r;
            const int k = int(hist.size()) - 1;
            std::string stop;
            if (r <= s.tol)
                stop = "converged";
            else if (res.solves >= s.max_iter)
                stop = "stalled";
            else if (k >= s.stall_window && r > s.stall_ratio * hist[k - s.stall_window])
                stop = "stalled";
            if (!stop.empty()) {
                StepRecord last;
                last.n = st.n;
                last.theta = st.theta;
                last.mu_n = st.mu_n;
                last.lam = st.lam;
                last.domain = st.domain;
                last.norm_f0 = r;
                last.trackers = st.trackers;
                last.fallback_flags = st.fallbacks;
                emit(last);
                res.status = stop;
                break;
            }
            StepRecord rec = step(st, s, sp, op, bc);
            ++res.solves;
            emit(rec);
        }
    } catch (const std::exception& e) {
        res.status = "aborted";
        res.message = e.what();
    }
    res.state = st;
    res.w = st.w;
    const double lf = limit_factor(s);
    res.w_inf = extract(st.w, inner_block(X, 0.5 * lf * (X.x_max - X.x_min), 0.5 * lf * (X.y_max - X.y_min)));
    return res;
}

}  // namespace ma
