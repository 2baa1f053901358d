#pragma once

#include <Eigen/Core>

#include "ma/grid.hpp"
#include "ma/problem.hpp"

namespace ma {

struct Stats {
    double sup = 0, l2 = 0;
};

/// Residuals of a solution; l2 is taken over X_inf in the scaled (x,y) frame.
struct VerificationReport {
    Stats ma_residual, ma_residual_scaled;
    Stats curvature_error, curvature_error_scaled;  // curvature mode
    Stats flatness_residual, flatness_eq;           // embedding mode
    Grid2D grid;                                    // (u,v) nodes of X_inf
    double hx = 0, hy = 0;
};

/// z = u^2/2 - v^4/12 + eps^9 w on the (u,v) image of w's grid, u = eps^4 x, v = eps^2 y.
Field reconstruct_z(const Field& w, const ProblemSpec& spec);

/// Fourth-order finite differences, one-sided near the edges.
Field diff4(const Field& f, int ax, int ay);

/// (z_uu z_vv - z_uv^2) / (1 + q^T M q)^2 with q = grad z.
Field graph_curvature(const Field& z, const Eigen::Matrix2d& M = Eigen::Matrix2d::Identity());

struct Flatness {
    Field brioschi;  // Gauss curvature of ds^2 - dz^2
    Field eq;        // embedding residual rescaled to the same quantity
    Field raw;       // det(z_ij - Gamma^k_ij z_k) - K (EG - F^2 - E z_v^2 - G z_u^2 + 2F z_u z_v)
};

Flatness flatness_residual(const MetricSpec& m, const Field& z);

/// Residual of det(z_ij + a_ij) = K f from a fresh differentiation of z.
Field ma_residual(const ProblemSpec& spec, const Field& z);

/// Full report for w given on X; residuals are evaluated on the nodes of X_inf.
VerificationReport verify_solution(const ProblemSpec& spec, const Field& w, double limit_factor);

}  // namespace ma
