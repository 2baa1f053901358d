#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include "ma/grid.hpp"

namespace ma {

enum class Mode { curvature, embedding };

using AD1 = Eigen::AutoDiffScalar<Eigen::Vector2d>;
using AD2 = Eigen::AutoDiffScalar<Eigen::Matrix<AD1, 2, 1>>;

/// Metric coefficients as functions of (u,v), evaluated with nested forward AD.
struct MetricSpec {
    std::string name;
    std::function<void(const AD2& u, const AD2& v, AD2& E, AD2& F, AD2& G)> eval;
};

/// Values, gradients and Hessians of E,F,G at a point. Index 0 is u, 1 is v.
struct MetricJet {
    double g[3];         // E F G
    double dg[3][2];     // d_k of E F G
    double ddg[3][2][2];
};

struct Geometry {
    double E = 1, F = 0, G = 1;
    double gam[2][3] = {{0, 0, 0}, {0, 0, 0}};  // gam[k][ij], ij in {11,12,22}
    double K = 0;
};

MetricJet metric_jet(const MetricSpec& m, double u, double v);
Geometry geometry_from_jet(const MetricJet& j);
double brioschi(const MetricJet& j);

/// Built-in curvature functions, selected by name with numeric parameters.
std::function<double(double, double)> builtin_K(const std::string& name, const std::vector<double>& coeffs);
MetricSpec builtin_metric(const std::string& name, const std::vector<double>& coeffs);

struct Diagnosis {
    double K0 = 0;
    double grad[2] = {0, 0};
    double eig[2] = {0, 0};  // descending
    bool accepted = false;
    std::string reason;
};

Diagnosis check_hypotheses(const std::function<double(double, double)>& K, double tol = 1e-8);

/// Hessian of a scalar function at the origin by 4th-order central differences.
Eigen::Matrix2d hessian_at_origin(const std::function<double(double, double)>& F, double h = 1e-2);

struct Normalization {
    Eigen::Matrix2d A = Eigen::Matrix2d::Identity();  // old = A * new
    double zscale = 1;                                // z_old = zscale * z_new
    double metric_scale = 1;                          // embedding: new metric = metric_scale * pulled metric
    double gamma0[2][3] = {{0, 0, 0}, {0, 0, 0}};     // embedding: quadratic coordinate change
};

/// Linear map making the v'^2 coefficient of the quadratic part of K*f0 equal to -1.
Normalization normalize(const std::function<double(double, double)>& K, const std::function<double(double, double)>& f0);

/// The nonlinear problem det(z_ij + a_ij) = K f in normalized coordinates.
struct ProblemSpec {
    Mode mode = Mode::curvature;
    std::string label;
    std::function<double(double, double)> K;
    std::function<Geometry(double, double)> geom;  // embedding only
    Eigen::Matrix2d M = Eigen::Matrix2d::Identity();  // curvature: f = (1 + q^T M q)^2
    MetricSpec metric;                                 // embedding: normalized metric
    Normalization norm;
    double epsilon = 0.05;
    double x0 = 1, y0 = 1;
    double psi_inner = 0.5, psi_outer = 0.75;
    bool remainder = true;

    std::array<double, 3> a(double u, double v, double p, double q1, double q2) const;
    double f(double u, double v, double p, double q1, double q2) const;
};

ProblemSpec curvature_problem(const std::function<double(double, double)>& K, double epsilon, bool do_normalize = true);
ProblemSpec metric_to_problem(const MetricSpec& m, double epsilon);
void validate(const ProblemSpec& p);

/// Cut-off profile: 1 for |t|<=a, 0 for |t|>=b, quintic blend between.
double smoothstep(double t);
double cutoff1d(double t, double a, double b);

struct CoefficientSet {
    Field a11, a12, a22, a1, a2, a;
    double lambda_budget = 0;
};

CoefficientSet zero_coeffs(const Grid2D& g);
/// a11 u_xx + 2 a12 u_xy + a22 u_yy + a1 u_x + a2 u_y + a u with grid-field stencils.
Field apply_operator(const CoefficientSet& c, const Field& u);

/// Phi(w) on the rectangle X = [-x0,x0]x[-y0,y0].
class ScaledOperator {
public:
    ScaledOperator(ProblemSpec spec, const Grid2D& grid);

    const ProblemSpec& spec() const { return spec_; }
    const Grid2D& grid() const { return grid_; }
    const Field& psi() const { return psi_; }

    Field phi_apply(const Field& w) const;
    CoefficientSet linearize(const Field& w) const;

    /// Remainder eps*F~ at one node before the cut-off.
    double remainder_at(int node, double x, double y, const double s[6]) const;

private:
    ProblemSpec spec_;
    Grid2D grid_;
    Field psi_;
    std::vector<double> K_;
    std::vector<Geometry> geo_;
    void derivs(const Field& w, Field d[6]) const;
};

}  // namespace ma
