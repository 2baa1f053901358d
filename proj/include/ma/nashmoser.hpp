#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ma/charcoords.hpp"
#include "ma/grid.hpp"
#include "ma/linsolve.hpp"
#include "ma/problem.hpp"
#include "ma/strip.hpp"

namespace ma {

struct Schedule {
    double mu = 6, tau = 1.6;
    int n0 = 0;
    double theta0 = 1e-6, theta_decay = 0.5;
    int max_iter = 12;
    int s_star = 100, s_track = 4;
    double tol = 1e-7;
    double stall_ratio = 0.99;  // stalled when |f_n| > stall_ratio |f_{n-3}|
    int stall_window = 3;
};

void validate(const Schedule& s);

double delta_of(const Schedule& s);
double sigma_of(const Schedule& s, int n);
double mu_of(const Schedule& s, int n);
double theta_of(const Schedule& s, int n);
/// X_n = domain_factor(n) X and its limit.
double domain_factor(const Schedule& s, int n);
double limit_factor(const Schedule& s);

/// X_n re-gridded with the node counts of X.
Grid2D domain_sequence(const Schedule& s, const Grid2D& X, int n);
/// Nodes of X lying in X_n.
Block domain_block(const Schedule& s, const Grid2D& X, int n);

/// Tensor cut-off on X: 1 on X_{n+1}, 0 outside X_n.
Field cutoff_phi(const Grid2D& X, const Grid2D& Xn, const Grid2D& Xn1);

struct TrackerEntry {
    double lhs = 0, rhs = 0;
    bool satisfied = true;
    int order = 0;  // norm order actually used
    double ratio() const { return rhs > 0 ? lhs / rhs : (lhs > 0 ? 1e300 : 0); }
};

struct TrackerReport {
    TrackerEntry I, II, III, IV;
};

struct TrackerConstants {
    double base = 0;  // |f_1| at the capped order
    double C1 = 0, C2 = 0, C3 = 0;
};

struct IterationState {
    int n = 1;
    Field w, f;
    double theta = 0, mu_n = 0, lam = 1;
    Grid2D domain;
    TrackerReport trackers;
    int fallbacks = 0;
    Field u_prev;  // u_{n-1} on X, empty at n = 1
};

struct StepRecord {
    int n = 0;
    double theta = 0, mu_n = 0, lam = 1;
    Grid2D domain;
    double norm_f0 = 0;  // |f_n| on X_{n+1}
    bool stepped = false;
    double norm_u0 = 0, norm_su0 = 0, norm_su2 = 0, norm_dw0 = 0, q_norm = 0, norm_f_next = 0;
    double q_taylor = 0;        // |Phi(w + S u) - Phi(w) - L(w) S u| on X_{n+1}
    double solve_mismatch = 0;  // |f_n - L_theta(w_n) u_n| on X_{n+1}
    double solve_residual = 0, a12_residual = 0, jacobian_min = 1;
    bool fallback = false;
    int fallback_flags = 0;
    TrackerReport trackers;
};

nlohmann::json to_json(const StepRecord& r);

IterationState initial_state(const ScaledOperator& op, const Schedule& s);
TrackerReport trackers(const IterationState& st, const Schedule& s, const Grid2D& X, TrackerConstants& tc);

/// One linearized solve and update; st advances to n + 1.
StepRecord step(IterationState& st, const Schedule& s, const StripParams& sp, const ScaledOperator& op, BC bc);

struct RunResult {
    Field w;      // on X
    Field w_inf;  // restricted to X_inf
    IterationState state;
    std::vector<StepRecord> log;
    std::string status;  // converged, stalled, aborted
    std::string message;
    double f1_norm = 0, final_norm = 0;
    int solves = 0;
};

RunResult run(const ScaledOperator& op, const Schedule& s, const StripParams& sp, BC bc = BC::dirichlet,
              const std::function<void(const StepRecord&)>& on_record = {});

}  // namespace ma
