#include "ma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ma {

Grid2D::Grid2D(double x0, double x1, double y0, double y1, int nx_, int ny_)
    : x_min(x0), x_max(x1), y_min(y0), y_max(y1), nx(nx_), ny(ny_) {
    if (!(x0 < x1) || !(y0 < y1)) throw std::invalid_argument("grid: empty rectangle");
    if (nx < 9 || ny < 9) throw std::invalid_argument("grid: need at least 9 nodes per axis");
}

bool Grid2D::operator==(const Grid2D& o) const {
    return nx == o.nx && ny == o.ny && x_min == o.x_min && x_max == o.x_max && y_min == o.y_min &&
           y_max == o.y_max;
}

Field::Field(const Grid2D& g, std::vector<double> values) : grid(g), v(std::move(values)) {
    if (v.size() != g.size()) throw std::invalid_argument("field: value count does not match grid");
}

static void same_grid(const Field& a, const Field& b) {
    if (a.grid != b.grid) throw std::invalid_argument("field: grid mismatch");
}

Field& Field::operator+=(const Field& o) {
    same_grid(*this, o);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
    return *this;
}
Field& Field::operator-=(const Field& o) {
    same_grid(*this, o);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
    return *this;
}
Field& Field::operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
}
Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }
Field mul(const Field& a, const Field& b) {
    same_grid(a, b);
    Field r = a;
    for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] *= b.v[k];
    return r;
}

std::vector<double> fornberg(int m, double z0, const std::vector<double>& z) {
    const int n = int(z.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = z[0] - z0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = z[i] - z0;
        for (int j = 0; j < i; ++j) {
            double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

Stencil1D stencil_1d(int m, int k, int n, double h) {
    Stencil1D s;
    if (m == 0) {
        s.start = k;
        s.w = {1.0};
        return s;
    }
    const int r = (m + 1) / 2;
    int len;
    if (k - r >= 0 && k + r <= n - 1) {
        s.start = k - r;
        len = 2 * r + 1;
    } else {
        len = m + 2;
        if (len > n) throw std::invalid_argument("diff: stencil larger than grid");
        s.start = k - r < 0 ? 0 : n - len;
    }
    std::vector<double> z(len);
    for (int q = 0; q < len; ++q) z[q] = s.start + q;
    s.w = fornberg(m, double(k), z);
    const double scale = std::pow(h, -m);
    for (auto& x : s.w) x *= scale;
    return s;
}

namespace {

std::vector<Stencil1D> stencils(int m, int n, double h) {
    std::vector<Stencil1D> st(n);
    for (int k = 0; k < n; ++k) st[k] = stencil_1d(m, k, n, h);
    return st;
}

Field apply_x(const Field& f, int m) {
    if (m == 0) return f;
    const auto& g = f.grid;
    auto st = stencils(m, g.nx, g.hx());
    Field r(g);
    for (int i = 0; i < g.nx; ++i) {
        const auto& s = st[i];
        for (int j = 0; j < g.ny; ++j) {
            double acc = 0;
            for (std::size_t q = 0; q < s.w.size(); ++q) acc += s.w[q] * f(s.start + int(q), j);
            r(i, j) = acc;
        }
    }
    return r;
}

Field apply_y(const Field& f, int m) {
    if (m == 0) return f;
    const auto& g = f.grid;
    auto st = stencils(m, g.ny, g.hy());
    Field r(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const auto& s = st[j];
            double acc = 0;
            for (std::size_t q = 0; q < s.w.size(); ++q) acc += s.w[q] * f(i, s.start + int(q));
            r(i, j) = acc;
        }
    return r;
}

double trap_weight(int k, int n) { return (k == 0 || k == n - 1) ? 0.5 : 1.0; }

}  // namespace

Field diff(const Field& f, int ax, int ay) {
    if (ax < 0 || ay < 0 || ax + ay > 4) throw std::invalid_argument("diff: order must satisfy ax+ay<=4");
    if (ax + 2 > f.grid.nx || ay + 2 > f.grid.ny) throw std::invalid_argument("diff: stencil larger than grid");
    return apply_y(apply_x(f, ax), ay);
}

double integrate(const Field& f) {
    const auto& g = f.grid;
    double acc = 0;
    for (int i = 0; i < g.nx; ++i) {
        double row = 0;
        for (int j = 0; j < g.ny; ++j) row += trap_weight(j, g.ny) * f(i, j);
        acc += trap_weight(i, g.nx) * row;
    }
    return acc * g.hx() * g.hy();
}

double inner(const Field& a, const Field& b) { return integrate(mul(a, b)); }
double l2(const Field& f) { return std::sqrt(std::max(0.0, inner(f, f))); }
double sup_abs(const Field& f) {
    double m = 0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

NormReport norms(const Field& f, int s_max) {
    if (s_max < 0 || s_max > 4) throw std::invalid_argument("norms: s_max must be in 0..4");
    NormReport r;
    double acc = 0, hol = 0;
    for (int s = 0; s <= s_max; ++s) {
        for (int a = 0; a <= s; ++a) {
            Field d = diff(f, a, s - a);
            acc += inner(d, d);
            hol = std::max(hol, sup_abs(d));
        }
        r.sobolev[s] = std::sqrt(acc);
        r.holder[s] = hol;
    }
    r.l2 = r.sobolev[0];
    return r;
}

namespace {

// Cell index and fraction of coordinate t on n nodes spaced h from t0; snaps to nodes.
void locate(double t, double t0, double h, int n, int& k, double& frac) {
    double s = (t - t0) / h;
    double rs = std::round(s);
    if (std::abs(s - rs) < 1e-9) s = rs;
    k = int(std::floor(s));
    if (k >= n - 1) k = n - 2;
    if (k < 0) k = 0;
    frac = s - k;
}

}  // namespace

Field restrict_to(const Field& f, const Grid2D& sub) {
    const auto& g = f.grid;
    const double tol = 1e-12 * std::max(g.x_max - g.x_min, g.y_max - g.y_min);
    if (sub.x_min < g.x_min - tol || sub.x_max > g.x_max + tol || sub.y_min < g.y_min - tol ||
        sub.y_max > g.y_max + tol)
        throw std::invalid_argument("restrict: sub rectangle exceeds parent");
    Field r(sub);
    std::vector<int> ik(sub.nx), jk(sub.ny);
    std::vector<double> fx(sub.nx), fy(sub.ny);
    for (int i = 0; i < sub.nx; ++i) locate(sub.x(i), g.x_min, g.hx(), g.nx, ik[i], fx[i]);
    for (int j = 0; j < sub.ny; ++j) locate(sub.y(j), g.y_min, g.hy(), g.ny, jk[j], fy[j]);
    for (int i = 0; i < sub.nx; ++i)
        for (int j = 0; j < sub.ny; ++j) {
            const int a = ik[i], b = jk[j];
            const double s = fx[i], t = fy[j];
            double val;
            if (s == 0.0 && t == 0.0)
                val = f(a, b);
            else if (s == 0.0)
                val = (1 - t) * f(a, b) + t * f(a, b + 1);
            else if (t == 0.0)
                val = (1 - s) * f(a, b) + s * f(a + 1, b);
            else
                val = (1 - s) * ((1 - t) * f(a, b) + t * f(a, b + 1)) + s * ((1 - t) * f(a + 1, b) + t * f(a + 1, b + 1));
            r(i, j) = val;
        }
    return r;
}

Block inner_block(const Grid2D& g, double rx, double ry) {
    const double xc = 0.5 * (g.x_min + g.x_max), yc = 0.5 * (g.y_min + g.y_max);
    const double tx = 1e-9 * g.hx(), ty = 1e-9 * g.hy();
    Block b{g.nx, -1, g.ny, -1};
    for (int i = 0; i < g.nx; ++i)
        if (std::abs(g.x(i) - xc) <= rx + tx) {
            b.i0 = std::min(b.i0, i);
            b.i1 = std::max(b.i1, i);
        }
    for (int j = 0; j < g.ny; ++j)
        if (std::abs(g.y(j) - yc) <= ry + ty) {
            b.j0 = std::min(b.j0, j);
            b.j1 = std::max(b.j1, j);
        }
    if (b.i1 < b.i0 || b.j1 < b.j0) throw std::invalid_argument("inner_block: no nodes inside");
    return b;
}

Grid2D block_grid(const Grid2D& g, const Block& b) {
    Grid2D s;
    s.x_min = g.x(b.i0);
    s.x_max = g.x(b.i1);
    s.y_min = g.y(b.j0);
    s.y_max = g.y(b.j1);
    s.nx = b.i1 - b.i0 + 1;
    s.ny = b.j1 - b.j0 + 1;
    return s;
}

Field extract(const Field& f, const Block& b) {
    Field r(block_grid(f.grid, b));
    for (int i = b.i0; i <= b.i1; ++i)
        for (int j = b.j0; j <= b.j1; ++j) r(i - b.i0, j - b.j0) = f(i, j);
    return r;
}

double l2_on(const Field& f, const Block& b) {
    const auto& g = f.grid;
    const int nx = b.i1 - b.i0 + 1, ny = b.j1 - b.j0 + 1;
    double acc = 0;
    for (int i = b.i0; i <= b.i1; ++i)
        for (int j = b.j0; j <= b.j1; ++j) {
            const double w = (nx == 1 ? 1.0 : trap_weight(i - b.i0, nx)) * (ny == 1 ? 1.0 : trap_weight(j - b.j0, ny));
            acc += w * f(i, j) * f(i, j);
        }
    return std::sqrt(acc * g.hx() * g.hy());
}

double sup_on(const Field& f, const Block& b) {
    double m = 0;
    for (int i = b.i0; i <= b.i1; ++i)
        for (int j = b.j0; j <= b.j1; ++j) m = std::max(m, std::abs(f(i, j)));
    return m;
}

void write_field(const std::string& path, const Field& f) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot write " + path);
    const auto& g = f.grid;
    std::fprintf(fp, "%d %d %.17g %.17g %.17g %.17g\n", g.nx, g.ny, g.x_min, g.x_max, g.y_min, g.y_max);
    for (double x : f.v) std::fprintf(fp, "%.17g\n", x);
    std::fclose(fp);
}

Field read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    Grid2D g;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    std::istringstream hs(line);
    if (!(hs >> g.nx >> g.ny >> g.x_min >> g.x_max >> g.y_min >> g.y_max))
        throw std::runtime_error(path + ": malformed header");
    g = Grid2D(g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny);
    std::vector<double> v;
    v.reserve(g.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        v.push_back(std::strtod(line.c_str(), nullptr));
    }
    if (v.size() != g.size()) throw std::runtime_error(path + ": expected " + std::to_string(g.size()) + " values");
    return Field(g, std::move(v));
}

}  // namespace ma
