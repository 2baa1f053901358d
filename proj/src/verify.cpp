#include "ma/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ma {

namespace {

// Weights of the (m+4)-point stencil for derivative m at each of n nodes.
std::vector<Stencil1D> stencils4(int m, int n, double h) {
    const int p = m + 4;
    if (n < p) throw std::invalid_argument("diff4: grid too small");
    std::vector<Stencil1D> r(n);
    for (int k = 0; k < n; ++k) {
        const int s = std::clamp(k - p / 2, 0, n - p);
        std::vector<double> z(p);
        for (int q = 0; q < p; ++q) z[q] = (s + q - k) * h;
        r[k].start = s;
        r[k].w = fornberg(m, 0.0, z);
    }
    return r;
}

Field apply_axis(const Field& f, int m, bool along_x) {
    if (m == 0) return f;
    const Grid2D& g = f.grid;
    const int n = along_x ? g.nx : g.ny;
    const auto st = stencils4(m, n, along_x ? g.hx() : g.hy());
    Field r(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const Stencil1D& s = st[along_x ? i : j];
            double acc = 0;
            for (std::size_t q = 0; q < s.w.size(); ++q)
                acc += s.w[q] * (along_x ? f(s.start + int(q), j) : f(i, s.start + int(q)));
            r(i, j) = acc;
        }
    return r;
}

Stats stats_on(const Field& f, const Grid2D& X, const Block& b) {
    Stats s;
    s.sup = sup_on(f, b);
    s.l2 = l2_on(Field(X, f.v), b);
    return s;
}

}  // namespace

Field diff4(const Field& f, int ax, int ay) { return apply_axis(apply_axis(f, ax, true), ay, false); }

Field reconstruct_z(const Field& w, const ProblemSpec& spec) {
    const double e = spec.epsilon, e2 = e * e, e4 = e2 * e2, e9 = e4 * e4 * e;
    const Grid2D& g = w.grid;
    Grid2D uv;
    uv.x_min = e4 * g.x_min;
    uv.x_max = e4 * g.x_max;
    uv.y_min = e2 * g.y_min;
    uv.y_max = e2 * g.y_max;
    uv.nx = g.nx;
    uv.ny = g.ny;
    Field z(uv);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double u = e4 * g.x(i), v = e2 * g.y(j);
            z(i, j) = 0.5 * u * u - v * v * v * v / 12 + e9 * w(i, j);
        }
    return z;
}

Field graph_curvature(const Field& z, const Eigen::Matrix2d& M) {
    const Field zu = diff4(z, 1, 0), zv = diff4(z, 0, 1), zuu = diff4(z, 2, 0), zuv = diff4(z, 1, 1), zvv = diff4(z, 0, 2);
    Field K(z.grid);
    for (std::size_t n = 0; n < K.v.size(); ++n) {
        const double p = zu.v[n], q = zv.v[n];
        const double s = 1 + M(0, 0) * p * p + 2 * M(0, 1) * p * q + M(1, 1) * q * q;
        K.v[n] = (zuu.v[n] * zvv.v[n] - zuv.v[n] * zuv.v[n]) / (s * s);
    }
    return K;
}

Flatness flatness_residual(const MetricSpec& m, const Field& z) {
    const Grid2D& g = z.grid;
    const Field zu = diff4(z, 1, 0), zv = diff4(z, 0, 1), zuu = diff4(z, 2, 0), zuv = diff4(z, 1, 1), zvv = diff4(z, 0, 2);
    const Field zuuv = diff4(z, 2, 1), zuvv = diff4(z, 1, 2);
    Flatness r{Field(g), Field(g), Field(g)};
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t n = std::size_t(i) * g.ny + j;
            const MetricJet J = metric_jet(m, g.x(i), g.y(j));
            const double p = zu.v[n], q = zv.v[n], puu = zuu.v[n], puv = zuv.v[n], pvv = zvv.v[n];
            MetricJet B = J;
            B.g[0] -= p * p;
            B.g[1] -= p * q;
            B.g[2] -= q * q;
            B.dg[0][0] -= 2 * p * puu;
            B.dg[0][1] -= 2 * p * puv;
            B.dg[1][0] -= puu * q + p * puv;
            B.dg[1][1] -= puv * q + p * pvv;
            B.dg[2][0] -= 2 * q * puv;
            B.dg[2][1] -= 2 * q * pvv;
            B.ddg[0][1][1] -= 2 * (puv * puv + p * zuvv.v[n]);
            B.ddg[1][0][1] -= zuuv.v[n] * q + puu * pvv + puv * puv + p * zuvv.v[n];
            B.ddg[1][1][0] = B.ddg[1][0][1];
            B.ddg[2][0][0] -= 2 * (puv * puv + q * zuuv.v[n]);
            const double detg = J.g[0] * J.g[2] - J.g[1] * J.g[1];
            const double detb = B.g[0] * B.g[2] - B.g[1] * B.g[1];
            if (!(B.g[0] > 0 && detb > 0)) throw std::domain_error("flatness: ds^2 - dz^2 is not positive definite");
            r.brioschi.v[n] = brioschi(B);
            const Geometry G = geometry_from_jet(J);
            const double h11 = puu - G.gam[0][0] * p - G.gam[1][0] * q;
            const double h12 = puv - G.gam[0][1] * p - G.gam[1][1] * q;
            const double h22 = pvv - G.gam[0][2] * p - G.gam[1][2] * q;
            const double rhs = detg - G.E * q * q - G.G * p * p + 2 * G.F * p * q;
            r.raw.v[n] = h11 * h22 - h12 * h12 - G.K * rhs;
            r.eq.v[n] = -r.raw.v[n] * detg / (detb * detb);
        }
    return r;
}

Field ma_residual(const ProblemSpec& spec, const Field& z) {
    const Grid2D& g = z.grid;
    const Field zu = diff4(z, 1, 0), zv = diff4(z, 0, 1), zuu = diff4(z, 2, 0), zuv = diff4(z, 1, 1), zvv = diff4(z, 0, 2);
    Field r(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t n = std::size_t(i) * g.ny + j;
            const double u = g.x(i), v = g.y(j);
            const auto a = spec.a(u, v, z.v[n], zu.v[n], zv.v[n]);
            const double f = spec.f(u, v, z.v[n], zu.v[n], zv.v[n]);
            const double m12 = zuv.v[n] + a[1];
            r.v[n] = (zuu.v[n] + a[0]) * (zvv.v[n] + a[2]) - m12 * m12 - spec.K(u, v) * f;
        }
    return r;
}

VerificationReport verify_solution(const ProblemSpec& spec, const Field& w, double limit_factor) {
    const Grid2D& X = w.grid;
    const Block b = inner_block(X, 0.5 * limit_factor * (X.x_max - X.x_min), 0.5 * limit_factor * (X.y_max - X.y_min));
    const Field z = reconstruct_z(w, spec);
    const double e5 = std::pow(spec.epsilon, 5);
    VerificationReport r;
    r.grid = block_grid(z.grid, b);
    r.hx = X.hx();
    r.hy = X.hy();
    const Field ma = ma_residual(spec, z);
    r.ma_residual = stats_on(ma, X, b);
    r.ma_residual_scaled = stats_on(ma * (1 / e5), X, b);
    if (spec.mode == Mode::curvature) {
        Field err = graph_curvature(z, spec.M);
        for (int i = 0; i < X.nx; ++i)
            for (int j = 0; j < X.ny; ++j) err(i, j) -= spec.K(z.grid.x(i), z.grid.y(j));
        r.curvature_error = stats_on(err, X, b);
        r.curvature_error_scaled = stats_on(err * (1 / e5), X, b);
    } else {
        const Flatness fl = flatness_residual(spec.metric, z);
        r.flatness_residual = stats_on(fl.brioschi, X, b);
        r.flatness_eq = stats_on(fl.eq, X, b);
    }
    return r;
}

}  // namespace ma
