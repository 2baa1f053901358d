#include "ma/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fftw3.h>

#include "ma/problem.hpp"

namespace ma {

double hat_profile(double r) {
    r = std::abs(r);
    if (r <= 1) return 1;
    if (r >= 2) return 0;
    return 1 - smoothstep(r - 1);
}

Field extend(const Field& f, double margin) {
    if (!(margin > 0)) throw std::invalid_argument("extend: margin must be positive");
    const Grid2D& g = f.grid;
    const int mx = std::max(1, int(std::lround(margin / g.hx()))), my = std::max(1, int(std::lround(margin / g.hy())));
    if (mx > g.nx - 1 || my > g.ny - 1) throw std::invalid_argument("extend: margin wider than the rectangle");
    const Grid2D e(g.x_min - mx * g.hx(), g.x_max + mx * g.hx(), g.y_min - my * g.hy(), g.y_max + my * g.hy(), g.nx + 2 * mx,
                   g.ny + 2 * my);
    auto reflect = [](int i, int n) { return i < 0 ? -i : (i > n - 1 ? 2 * (n - 1) - i : i); };
    auto taper = [](int d, int m) {
        const double t = double(d) / m;
        return t <= 0.5 ? 1.0 : 1 - smoothstep((t - 0.5) / 0.5);
    };
    Field r(e);
    for (int i = 0; i < e.nx; ++i) {
        const int ii = i - mx;
        const double wx = taper(ii < 0 ? -ii : std::max(0, ii - (g.nx - 1)), mx);
        for (int j = 0; j < e.ny; ++j) {
            const int jj = j - my;
            const double wy = taper(jj < 0 ? -jj : std::max(0, jj - (g.ny - 1)), my);
            const double v = f(reflect(ii, g.nx), reflect(jj, g.ny));
            r(i, j) = (wx == 1.0 && wy == 1.0) ? v : v * wx * wy;
        }
    }
    return r;
}

Field mollify(const Field& f, double gamma) {
    if (!(gamma >= 1)) throw std::invalid_argument("mollify: gamma must be at least 1");
    const Grid2D& g = f.grid;
    const int nx = g.nx, ny = g.ny;
    const std::size_t N = g.size();
    double* buf = fftw_alloc_real(N);
    fftw_plan fwd = fftw_plan_r2r_2d(nx, ny, buf, buf, FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE);
    std::copy(f.v.begin(), f.v.end(), buf);
    fftw_execute(fwd);
    const double Lx = g.x_max - g.x_min, Ly = g.y_max - g.y_min;
    for (int i = 0; i < nx; ++i) {
        const double kx = i / (2 * Lx);
        for (int j = 0; j < ny; ++j) {
            const double ky = j / (2 * Ly);
            buf[std::size_t(i) * ny + j] *= hat_profile(std::hypot(kx, ky) / gamma);
        }
    }
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    Field r(g);
    const double scale = 1.0 / (4.0 * (nx - 1) * (ny - 1));
    for (std::size_t k = 0; k < N; ++k) r.v[k] = buf[k] * scale;
    fftw_free(buf);
    return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0 && y[k] > 0)) continue;
        const double a = std::log(x[k]), b = std::log(y[k]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
        ++n;
    }
    if (n < 2) return 0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<Field> smoothing_probes(const Grid2D& g) {
    const double Lx = g.x_max - g.x_min, Ly = g.y_max - g.y_min, pi = 3.141592653589793;
    auto mode = [&](double kappa, bool along_x) {
        const double L = along_x ? Lx : Ly;
        const int n = along_x ? g.nx : g.ny;
        const int m = std::min(int(std::lround(2 * L * kappa)), n - 1);
        return [=](double x, double y) {
            const double t = along_x ? (x - g.x_min) / L : (y - g.y_min) / L;
            return std::cos(pi * m * t);
        };
    };
    std::vector<double> kap;
    for (double k = 1.5; 2 * std::max(Lx, Ly) * k <= 0.5 * (std::min(g.nx, g.ny) - 1); k *= 2) kap.push_back(k);
    std::vector<Field> p;
    p.push_back(Field::sample(g, [&](double x, double y) {
        return mode(0.25, true)(x, y) * mode(0.5, false)(x, y) + 0.5 * mode(0.5, true)(x, y);
    }));
    for (double k : kap) {
        p.push_back(Field::sample(g, [&](double x, double y) { return mode(k, true)(x, y); }));
        p.push_back(Field::sample(g, [&](double x, double y) { return mode(k, false)(x, y); }));
    }
    for (int decay = 0; decay <= 1; ++decay)
        p.push_back(Field::sample(g, [&](double x, double y) {
            double s = 0;
            for (double k : kap) s += (decay ? 1 / (k * k) : 1.0) * (mode(k, true)(x, y) + mode(k, false)(x, y));
            return s;
        }));
    return p;
}

SmoothingReport smoothing_constants(const std::vector<double>& gammas, const std::vector<Field>& probes) {
    SmoothingReport r;
    r.gammas = gammas;
    for (auto& row : r.c)
        for (auto& v : row) v.assign(gammas.size(), 0.0);
    r.rate.assign(gammas.size(), 0.0);
    std::vector<NormReport> base;
    for (const Field& f : probes) base.push_back(norms(f, 2));
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        const double gam = gammas[k];
        for (std::size_t p = 0; p < probes.size(); ++p) {
            if (base[p].sobolev.at(0) == 0) continue;
            const Field S = mollify(probes[p], gam);
            const NormReport ns = norms(S, 2);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const double v = ns.sobolev.at(b) / base[p].sobolev.at(a) / std::pow(gam, std::max(b - a, 0));
                    r.c[a][b][k] = std::max(r.c[a][b][k], v);
                }
            r.rate[k] = std::max(r.rate[k], l2(probes[p] - S) / base[p].sobolev.at(2));
        }
    }
    r.pass = true;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const auto& v = r.c[a][b];
            const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
            r.spread[a][b] = lo > 0 ? hi / lo : 0;
            if (!(lo > 0 && hi / lo < 2)) r.pass = false;
        }
    r.rate_slope = -loglog_slope(gammas, r.rate);
    return r;
}

}  // namespace ma
