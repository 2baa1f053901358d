#include "ma/charcoords.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ma {

namespace {

// Base index and local coordinate of t among n uniform nodes for a 4-point stencil.
void lag_locate(double t, double t0, double h, int n, int& base, double& s) {
    double q = (t - t0) / h;
    const double rq = std::round(q);
    if (std::abs(q - rq) < 1e-9) q = rq;
    base = std::clamp(int(std::floor(q)) - 1, 0, n - 4);
    s = q - base;
}

void lag_weights(double s, double w[4], double dw[4]) {
    const double p[4] = {0, 1, 2, 3};
    for (int k = 0; k < 4; ++k) {
        double num = 1, den = 1;
        for (int m = 0; m < 4; ++m)
            if (m != k) {
                num *= s - p[m];
                den *= p[k] - p[m];
            }
        w[k] = num / den;
        if (dw) {
            double d = 0;
            for (int a = 0; a < 4; ++a) {
                if (a == k) continue;
                double t = 1;
                for (int m = 0; m < 4; ++m)
                    if (m != k && m != a) t *= s - p[m];
                d += t;
            }
            dw[k] = d / den;
        }
    }
}

// Lagrange interpolation through up to four nonuniform points nearest to t.
double lag_nonuniform(const std::vector<double>& X, const std::vector<double>& F, double t) {
    const int n = int(X.size());
    int k = int(std::upper_bound(X.begin(), X.end(), t) - X.begin()) - 1;
    int b = std::clamp(k - 1, 0, n - 4);
    double r = 0;
    for (int a = b; a < b + 4; ++a) {
        double l = 1;
        for (int m = b; m < b + 4; ++m)
            if (m != a) l *= (t - X[m]) / (X[a] - X[m]);
        r += l * F[a];
    }
    return r;
}

struct Rhs {
    const Field& G;
    void operator()(double x, double y, double xs, double& dx, double& dxs) const {
        double gx;
        dx = interp2(G, x, y, &gx);
        dxs = gx * xs;
    }
};

}  // namespace

double interp_row(const Field& f, int j, double x) {
    const auto& g = f.grid;
    int b;
    double s;
    lag_locate(x, g.x_min, g.hx(), g.nx, b, s);
    if (s == std::round(s) && b + int(s) < g.nx) return f(b + int(s), j);
    double w[4];
    lag_weights(s, w, nullptr);
    double r = 0;
    for (int k = 0; k < 4; ++k) r += w[k] * f(b + k, j);
    return r;
}

double interp2(const Field& f, double x, double y, double* dfdx) {
    const auto& g = f.grid;
    int bx, by;
    double sx, sy;
    lag_locate(x, g.x_min, g.hx(), g.nx, bx, sx);
    lag_locate(y, g.y_min, g.hy(), g.ny, by, sy);
    double wx[4], dwx[4], wy[4];
    lag_weights(sx, wx, dwx);
    lag_weights(sy, wy, nullptr);
    double r = 0, d = 0;
    for (int a = 0; a < 4; ++a) {
        double row = 0;
        for (int b = 0; b < 4; ++b) row += wy[b] * f(bx + a, by + b);
        r += wx[a] * row;
        d += dwx[a] * row;
    }
    if (dfdx) *dfdx = d / g.hx();
    return r;
}

DiffeoMap build_characteristics(const CoefficientSet& c) {
    const Grid2D& g = c.a12.grid;
    const int nx = g.nx, ny = g.ny;
    Field G(g);
    for (std::size_t k = 0; k < G.v.size(); ++k) {
        const double a22 = c.a22.v[k];
        if (!(std::abs(a22) > 1e-8)) throw std::domain_error("characteristics: a22 vanishes");
        G.v[k] = c.a12.v[k] / a22;
    }
    bool flat = std::all_of(G.v.begin(), G.v.end(), [](double x) { return x == 0.0; });

    // X[k][j], XS[k][j]: position and dX/ds of the characteristic from seed x_k at height y_j
    std::vector<std::vector<double>> X(nx, std::vector<double>(ny)), XS(nx, std::vector<double>(ny));
    const double hy = g.hy();
    std::vector<int> up, down;
    for (int j = 0; j < ny; ++j) (g.y(j) >= 0 ? up : down).push_back(j);
    std::reverse(down.begin(), down.end());
    const double tol = 1e-12 * (g.x_max - g.x_min);
    for (int k = 0; k < nx; ++k) {
        const double s0 = g.x(k);
        for (const auto* seq : {&up, &down}) {
            double x = s0, xs = 1, t = 0;
            for (int j : *seq) {
                const double target = g.y(j);
                if (!flat) {
                    const int nsub = std::max(1, int(std::ceil(std::abs(target - t) / (0.5 * hy) - 1e-9)));
                    const double h = (target - t) / nsub;
                    Rhs f{G};
                    for (int q = 0; q < nsub; ++q) {
                        double k1x, k1s, k2x, k2s, k3x, k3s, k4x, k4s;
                        f(x, t, xs, k1x, k1s);
                        f(x + 0.5 * h * k1x, t + 0.5 * h, xs + 0.5 * h * k1s, k2x, k2s);
                        f(x + 0.5 * h * k2x, t + 0.5 * h, xs + 0.5 * h * k2s, k3x, k3s);
                        f(x + h * k3x, t + h, xs + h * k3s, k4x, k4s);
                        x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
                        xs += h / 6 * (k1s + 2 * k2s + 2 * k3s + k4s);
                        t += h;
                    }
                }
                t = target;
                if (k > 0 && k < nx - 1 && (x < g.x_min - tol || x > g.x_max + tol))
                    throw std::domain_error("characteristics: a characteristic leaves the rectangle; epsilon too large");
                X[k][j] = x;
                XS[k][j] = xs;
            }
        }
        for (int j = 0; j < ny; ++j) {
            if (k == 0) X[k][j] = g.x_min;
            if (k == nx - 1) X[k][j] = g.x_max;
        }
    }

    DiffeoMap m;
    m.xi = m.xi_x = m.xi_y = m.inverse_x = Field(g);
    double jmin = 1e300;
    std::vector<double> Xr(nx), Sr(nx), Dr(nx), Yr(nx);
    for (int j = 0; j < ny; ++j) {
        const double y = g.y(j);
        for (int k = 0; k < nx; ++k) {
            Xr[k] = X[k][j];
            if (!(XS[k][j] > 0)) throw std::domain_error("characteristics: fold detected (dX/ds <= 0)");
            Dr[k] = 1 / XS[k][j];
            Yr[k] = -Dr[k] * interp2(G, Xr[k], y);
            m.inverse_x(k, j) = Xr[k];
            if (k > 0 && !(Xr[k] > Xr[k - 1])) throw std::domain_error("characteristics: seeds not strictly ordered");
        }
        int k = 0;
        for (int i = 0; i < nx; ++i) {
            const double x = g.x(i);
            while (k < nx - 2 && Xr[k + 1] <= x) ++k;
            const double L = Xr[k + 1] - Xr[k];
            const double t = std::clamp((x - Xr[k]) / L, 0.0, 1.0);
            const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
            const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
            double xi = h00 * g.x(k) + h10 * L * Dr[k] + h01 * g.x(k + 1) + h11 * L * Dr[k + 1];
            if (t == 0.0) xi = g.x(k);
            if (t == 1.0) xi = g.x(k + 1);
            m.xi(i, j) = xi;
            if (flat) {
                m.xi_x(i, j) = 1;
                m.xi_y(i, j) = 0;
            } else {
                m.xi_x(i, j) = lag_nonuniform(Xr, Dr, x);
                m.xi_y(i, j) = lag_nonuniform(Xr, Yr, x);
            }
            jmin = std::min(jmin, m.xi_x(i, j));
        }
        m.xi(0, j) = g.x_min;
        m.xi(nx - 1, j) = g.x_max;
    }
    if (!(jmin > 0)) throw std::domain_error("characteristics: fold detected (xi_x <= 0)");
    m.jacobian_min = jmin;
    m.xi_xx = diff(m.xi_x, 1, 0);
    m.xi_xy = diff(m.xi_x, 0, 1);
    m.xi_yy = diff(m.xi_y, 0, 1);
    for (int j = 0; j < ny; ++j) {
        m.boundary_dev = std::max({m.boundary_dev, std::abs(m.xi(0, j) - g.x_min), std::abs(m.xi(nx - 1, j) - g.x_max)});
        if (std::abs(g.y(j)) < 1e-12 * hy)
            for (int i = 0; i < nx; ++i) m.axis_dev = std::max(m.axis_dev, std::abs(m.xi(i, j) - g.x(i)));
    }
    return m;
}

PushResult pushforward(const CoefficientSet& c, const DiffeoMap& m, double tol) {
    const Grid2D& g = c.a11.grid;
    PushResult r;
    CoefficientSet at_x = zero_coeffs(g);
    double res = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double a11 = c.a11.v[n], a12 = c.a12.v[n], a22 = c.a22.v[n], a1 = c.a1.v[n], a2 = c.a2.v[n];
        const double xx = m.xi_x.v[n], xy = m.xi_y.v[n];
        at_x.a11.v[n] = a11 * xx * xx + 2 * a12 * xx * xy + a22 * xy * xy;
        at_x.a12.v[n] = a12 * xx + a22 * xy;
        at_x.a22.v[n] = a22;
        at_x.a1.v[n] = a11 * m.xi_xx.v[n] + 2 * a12 * m.xi_xy.v[n] + a22 * m.xi_yy.v[n] + a1 * xx + a2 * xy;
        at_x.a2.v[n] = a2;
        at_x.a.v[n] = c.a.v[n];
        res = std::max(res, std::abs(at_x.a12.v[n]));
    }
    r.a12_residual = res;
    if (res > tol) throw std::domain_error("pushforward: mixed coefficient residual " + std::to_string(res) + " above tolerance");
    r.c.a11 = push_field(at_x.a11, m);
    r.c.a12 = Field(g);
    r.c.a22 = push_field(at_x.a22, m);
    r.c.a1 = push_field(at_x.a1, m);
    r.c.a2 = push_field(at_x.a2, m);
    r.c.a = push_field(at_x.a, m);
    double b = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            b = std::max({b, std::abs(r.c.a11(i, j) + y * y), std::abs(r.c.a22(i, j) - 1), std::abs(r.c.a1(i, j)),
                          std::abs(r.c.a2(i, j)), std::abs(r.c.a(i, j))});
        }
    r.b_sup = b;
    r.c.lambda_budget = c.lambda_budget;
    return r;
}

Field push_field(const Field& f, const DiffeoMap& m) {
    const Grid2D& g = f.grid;
    Field r(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) r(i, j) = interp_row(f, j, m.inverse_x(i, j));
    return r;
}

Field pullback_solution(const Field& u, const DiffeoMap& m) {
    const Grid2D& g = u.grid;
    Field r(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) r(i, j) = interp_row(u, j, m.xi(i, j));
    return r;
}

}  // namespace ma
