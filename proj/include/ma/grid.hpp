#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace ma {

/// Uniform tensor grid over a rectangle.
struct Grid2D {
    double x_min = -1, x_max = 1, y_min = -1, y_max = 1;
    int nx = 9, ny = 9;

    Grid2D() = default;
    Grid2D(double x0, double x1, double y0, double y1, int nx_, int ny_);

    double hx() const { return (x_max - x_min) / (nx - 1); }
    double hy() const { return (y_max - y_min) / (ny - 1); }
    double x(int i) const { return i == nx - 1 ? x_max : x_min + i * hx(); }
    double y(int j) const { return j == ny - 1 ? y_max : y_min + j * hy(); }
    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }

    bool operator==(const Grid2D& o) const;
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

/// Scalar samples on a grid, row-major with y fastest.
struct Field {
    Grid2D grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid2D& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}
    Field(const Grid2D& g, std::vector<double> values);

    template <class F>
    static Field sample(const Grid2D& g, F f) {
        Field r(g);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) r(i, j) = f(g.x(i), g.y(j));
        return r;
    }

    double& operator()(int i, int j) { return v[std::size_t(i) * grid.ny + j]; }
    double operator()(int i, int j) const { return v[std::size_t(i) * grid.ny + j]; }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);
Field mul(const Field& a, const Field& b);

struct NormReport {
    double l2 = 0;
    std::map<int, double> sobolev;
    std::map<int, double> holder;
};

/// Weights of the 2nd-order accurate stencil for d^m/dx^m at node k of n uniform nodes.
struct Stencil1D {
    int start = 0;
    std::vector<double> w;
};
Stencil1D stencil_1d(int m, int k, int n, double h);

/// Fornberg finite-difference weights for derivative m at z0 over points z.
std::vector<double> fornberg(int m, double z0, const std::vector<double>& z);

Field diff(const Field& f, int ax, int ay);
NormReport norms(const Field& f, int s_max);
Field restrict_to(const Field& f, const Grid2D& sub);

double integrate(const Field& f);
double inner(const Field& a, const Field& b);
double l2(const Field& f);
double sup_abs(const Field& f);

/// Node index range [i0,i1]x[j0,j1] of the nodes with |x-xc|<=rx and |y-yc|<=ry.
struct Block {
    int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
};
Block inner_block(const Grid2D& g, double rx, double ry);
Grid2D block_grid(const Grid2D& g, const Block& b);
Field extract(const Field& f, const Block& b);
double l2_on(const Field& f, const Block& b);
double sup_on(const Field& f, const Block& b);

void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

}  // namespace ma
