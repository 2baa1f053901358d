#include "ma/strip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ma {

namespace {

// Integral of the quintic smoothstep from 0 to t in [0,1].
double smoothstep_int(double t) { return t * t * t * t * (2.5 + t * (-3 + t)); }

double dsmoothstep(double t) {
    if (t <= 0 || t >= 1) return 0;
    return 30 * t * t * (1 - t) * (1 - t);
}

// Integral of t S(t) from 0 to t.
double smoothstep_int1(double t) { return t * t * t * t * t * (2 + t * (-2.5 + t * 6.0 / 7.0)); }

double bump(double t) { return std::abs(t) < 1 ? std::exp(-1 / (1 - t * t)) : 0.0; }

}  // namespace

void validate(const StripParams& p) {
    if (!(p.y0 > 0 && p.y0 < p.y1 && p.y1 < p.y2 && p.y2 < p.y3 && p.y3 < p.Y))
        throw std::invalid_argument("strip: need 0 < y0 < y1 < y2 < y3 < Y");
    if (!(p.delta > 0)) throw std::invalid_argument("strip: delta must be positive");
    if (!(p.theta >= 0)) throw std::invalid_argument("strip: theta must be nonnegative");
    if (!(0 < p.edge_in && p.edge_in < p.edge_out && p.edge_out < 1))
        throw std::invalid_argument("strip: need 0 < edge_in < edge_out < 1");
    double sup2 = -1e300, margin = 1e300;
    for (int k = 0; k <= 2000; ++k) {
        const double y = p.y1 + (p.y2 - p.y1) * k / 2000.0;
        double v, d1, d2;
        a11_profile(p, y, v, d1, d2);
        sup2 = std::max(sup2, d2);
        margin = std::min(margin, -v - d2);
    }
    if (sup2 > p.a11_curv)
        throw std::domain_error("strip: sup dyy a11 = " + std::to_string(sup2) + " exceeds a11_curv");
    if (!(margin > 0)) throw std::domain_error("strip: dyy a11 < -a11 violated in the blend");
}

StripLayout strip_layout(const Grid2D& X, const StripParams& p) {
    const double hy = X.hy();
    const int M = int(std::ceil((p.Y - X.y_max) / hy - 1e-9));
    StripLayout L;
    L.j_off = M;
    L.grid = Grid2D(X.x_min, X.x_max, X.y_min - M * hy, X.y_max + M * hy, X.nx, X.ny + 2 * M);
    return L;
}

void a11_profile(const StripParams& p, double ay, double& v, double& d1, double& d2) {
    if (ay <= p.y1) {
        v = -ay * ay;
        d1 = -2 * ay;
        d2 = -2;
        return;
    }
    // dy a11 = -2 y (1 - S(t)) on the blend, t = (|y| - y1) / (y2 - y1)
    const double W = p.y2 - p.y1;
    const double t = std::min((ay - p.y1) / W, 1.0);
    v = -p.y1 * p.y1 - 2 * W * (p.y1 * (t - smoothstep_int(t)) + W * (0.5 * t * t - smoothstep_int1(t)));
    if (t >= 1) {
        d1 = d2 = 0;
        return;
    }
    const double y = p.y1 + W * t;
    d1 = -2 * y * (1 - smoothstep(t));
    d2 = -2 * (1 - smoothstep(t)) + 2 * y * dsmoothstep(t) / W;
}

double a2_profile(const StripParams& p, double y) {
    const double ay = std::abs(y);
    if (ay <= p.y2) return 0;
    const double W = p.y3 - p.y2;
    const double g = ay >= p.y3 ? ay - 0.5 * (p.y2 + p.y3) : W * smoothstep_int((ay - p.y2) / W);
    return -(y > 0 ? 1 : -1) * p.delta * g;
}

double a_profile(const StripParams& p, double y) {
    const double ay = std::abs(y);
    if (ay <= p.y0) return 0;
    return smoothstep((ay - p.y0) / (p.y1 - p.y0));
}

CoefficientSet model_coeffs(const Grid2D& X) {
    CoefficientSet c = zero_coeffs(X);
    c.a11 = Field::sample(X, [](double, double y) { return -y * y; });
    c.a22 = Field(X, 1.0);
    return c;
}

CoefficientSet extend_to_strip(const CoefficientSet& cX, const StripParams& p, StripLayout* layout) {
    validate(p);
    const Grid2D& X = cX.a11.grid;
    if (std::abs(X.y_max - p.y0) > 1e-12 || std::abs(X.y_min + p.y0) > 1e-12)
        throw std::invalid_argument("strip: coefficient grid must span |y| <= y0");
    StripLayout L = strip_layout(X, p);
    const Grid2D& g = L.grid;
    CoefficientSet s = zero_coeffs(g);
    const double x0 = std::max(std::abs(X.x_min), std::abs(X.x_max));
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        const double edge = p.theta * smoothstep((std::abs(x) / x0 - p.edge_in) / (p.edge_out - p.edge_in));
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            const int jx = j - L.j_off;
            if (jx >= 0 && jx < X.ny) {
                s.a11(i, j) = cX.a11(i, jx);
                s.a12(i, j) = cX.a12(i, jx);
                s.a22(i, j) = cX.a22(i, jx);
                s.a1(i, j) = cX.a1(i, jx);
                s.a2(i, j) = cX.a2(i, jx);
                s.a(i, j) = cX.a(i, jx);
            } else {
                double v, d1, d2;
                a11_profile(p, std::abs(y), v, d1, d2);
                s.a11(i, j) = v;
                s.a22(i, j) = 1;
                s.a2(i, j) = a2_profile(p, y);
                s.a(i, j) = a_profile(p, y);
            }
            s.a11(i, j) -= edge;
        }
    }
    s.lambda_budget = cX.lambda_budget;
    if (layout) *layout = L;
    return s;
}

MultiplierSet build_multipliers(const CoefficientSet& strip, const StripParams& p, double theta) {
    const Grid2D& g = strip.a11.grid;
    MultiplierSet m;
    double amax = -1e300;
    for (double v : strip.a11.v) amax = std::max(amax, 1 - v);
    m.mu = 1.1 * 4 * amax;
    const Field dya = diff(strip.a11, 0, 1);
    m.C = Field(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            m.C(i, j) = std::abs(y) < p.y0 - 1e-12 ? m.mu * dya(i, j) : -2 * m.mu * y;
        }
    m.A = diff(m.C, 0, 1) * 0.5 - strip.a11;
    const double x0 = g.x_max;
    m.gamma = Field::sample(g, [&](double x, double) { return 1 - smoothstep((x - 0.5 * x0) / (0.5 * x0)); });
    m.B = m.gamma * (-theta);
    m.D = Field(g, theta);
    return m;
}

Field apply_L_theta(const CoefficientSet& c, double theta, const Field& u) {
    Field r = apply_operator(c, u);
    if (theta != 0) r -= diff(u, 2, 2) * theta;
    return r;
}

EnergyCheck check_energy_inequality(const CoefficientSet& strip, const MultiplierSet& m, double theta, const Field& u) {
    const Grid2D& g = u.grid;
    if (g != strip.a11.grid) throw std::invalid_argument("energy: probe grid differs from the strip grid");
    const double scale = sup_abs(u);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const bool near = i < 3 || j < 3 || i > g.nx - 4 || j > g.ny - 4;
            if (near && std::abs(u(i, j)) > 1e-14 * scale)
                throw std::invalid_argument("energy: probe must vanish within three nodes of the boundary");
        }
    const Field Lu = apply_L_theta(strip, theta, u);
    const Field ux = diff(u, 1, 0), uy = diff(u, 0, 1), uyy = diff(u, 0, 2), uxy = diff(u, 1, 1), uxyy = diff(u, 1, 2);
    Field mult = mul(m.A, u) + mul(m.B, ux) + mul(m.C, uy) + mul(m.D, uyy);
    EnergyCheck e;
    e.lhs = inner(mult, Lu);
    auto sq = [](const Field& f) { return inner(f, f); };
    e.rhs = sq(u) + sq(uy) + theta * (sq(ux) + sq(uxy) + sq(uyy) + theta * sq(uxyy));
    e.ratio = e.rhs > 0 ? e.lhs / e.rhs : 0;
    const double nL = l2(Lu);
    e.c2 = nL > 0 ? (l2(u) + l2(uy)) / nL : 0;
    return e;
}

Field random_probe(const Grid2D& g, double y_lim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0, 1);
    const double xl = std::min(0.9 * g.x_max, g.x_max - 3.5 * g.hx());
    const double rx = 0.2 + 0.25 * U(rng) * xl, ry = 0.2 + 0.3 * U(rng) * (y_lim - 0.2);
    const double cx = (xl - rx) * (2 * U(rng) - 1), cy = (y_lim - ry) * (2 * U(rng) - 1);
    const double c0 = 1, c1 = 2 * U(rng) - 1, c2 = 2 * U(rng) - 1, kx = 6 * U(rng), ph = 6.283185307179586 * U(rng);
    return Field::sample(g, [&](double x, double y) {
        const double s = (x - cx) / rx, t = (y - cy) / ry;
        return bump(s) * bump(t) * (c0 + c1 * s + c2 * t + 0.5 * std::cos(kx * x + ph));
    });
}

}  // namespace ma
