#pragma once

#include "ma/grid.hpp"
#include "ma/problem.hpp"

namespace ma {

/// Characteristic coordinates xi(x,y), eta = y, on the coefficient grid.
struct DiffeoMap {
    Field xi, xi_x, xi_y;
    Field xi_xx, xi_xy, xi_yy;
    Field inverse_x;  // x of the characteristic through (xi_i, y_j)
    double jacobian_min = 1;
    double axis_dev = 0;      // max |xi(x,0) - x| on the axis
    double boundary_dev = 0;  // max |xi(+-x0,y) -+ x0|
};

DiffeoMap build_characteristics(const CoefficientSet& c);

struct PushResult {
    CoefficientSet c;
    double a12_residual = 0;  // sup of a12 xi_x + a22 xi_y over the grid
    double b_sup = 0;         // sup of the perturbation fields of the pushed set
};

PushResult pushforward(const CoefficientSet& c, const DiffeoMap& m, double tol = 1e-5);
Field pullback_solution(const Field& u_xi_eta, const DiffeoMap& m);
Field push_field(const Field& g, const DiffeoMap& m);

/// 4-point Lagrange interpolation along row j of f at abscissa x.
double interp_row(const Field& f, int j, double x);
/// Bicubic tensor Lagrange interpolation, optionally with its x derivative.
double interp2(const Field& f, double x, double y, double* dfdx = nullptr);

}  // namespace ma
