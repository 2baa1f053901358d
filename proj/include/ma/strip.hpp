#pragma once

#include <random>

#include "ma/grid.hpp"
#include "ma/problem.hpp"

namespace ma {

/// Plateau geometry of the strip coefficients, all in |y|.
struct StripParams {
    double y0 = 1, y1 = 1.25, y2 = 3.25, y3 = 3.75, Y = 4.75;
    double delta = 0.05;     // slope of the damping a2 beyond y3
    double a11_curv = 4.0;   // bound on d2 a11 / dy2 in the blend
    double theta = 1e-6;     // strength of the x-edge correction of a11
    double edge_in = 0.85, edge_out = 0.95;  // x/x0 band of that correction
};

void validate(const StripParams& p);

/// Strip grid sharing the x nodes and y spacing of X; X occupies rows j_off .. j_off + X.ny - 1.
struct StripLayout {
    Grid2D grid;
    int j_off = 0;
};

StripLayout strip_layout(const Grid2D& X, const StripParams& p);

/// a11 and its first two y derivatives for |y| >= y0 (even in y, given as functions of |y|).
void a11_profile(const StripParams& p, double ay, double& v, double& d1, double& d2);
double a2_profile(const StripParams& p, double y);
double a_profile(const StripParams& p, double y);

/// Continue a coefficient set given on X to the truncated strip.
CoefficientSet extend_to_strip(const CoefficientSet& cX, const StripParams& p, StripLayout* layout = nullptr);

/// Unperturbed Gallerstedt coefficients on X.
CoefficientSet model_coeffs(const Grid2D& X);

struct MultiplierSet {
    Field A, B, C, D;
    Field gamma;
    double mu = 0;
};

MultiplierSet build_multipliers(const CoefficientSet& strip, const StripParams& p, double theta);

/// L' u - theta u_xxyy with grid-field stencils.
Field apply_L_theta(const CoefficientSet& c, double theta, const Field& u);

struct EnergyCheck {
    double lhs = 0, rhs = 0, ratio = 0;
    double c2 = 0;  // (|u| + |u_y|) / |L_theta u|
};

EnergyCheck check_energy_inequality(const CoefficientSet& strip, const MultiplierSet& m, double theta, const Field& u);

/// Smooth random bump supported in |x| < 0.9 x_max, |y| < y_lim.
Field random_probe(const Grid2D& g, double y_lim, std::mt19937_64& rng);

}  // namespace ma
